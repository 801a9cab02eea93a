from .start import *
from .records import *
from .report import *
from .router import sweeps_router

__all__ = [
    'sweeps_router'
]
