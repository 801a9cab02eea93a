from .kak import *
from .mitigate import *
from .recompile import *
from .router import gates_router

__all__ = [
    'gates_router'
]
