import os
import tempfile

import numpy as np
import pytest

# must be set before app.config is imported anywhere
_DB_DIR = tempfile.mkdtemp(prefix="pcm-tests-")
os.environ.setdefault("PCM_DATABASE_URL", f"sqlite+aiosqlite:///{_DB_DIR}/sweeps.db")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
