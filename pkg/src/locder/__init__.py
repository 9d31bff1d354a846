"""Exact local-derivation analysis for truncated loop Virasoro algebras."""

from .algebra import *  # noqa: F401,F403
from .algebra import __all__ as _algebra_all
from .engine import *  # noqa: F401,F403
from .engine import __all__ as _engine_all
from .formats import *  # noqa: F401,F403
from .formats import __all__ as _formats_all
from .maps import *  # noqa: F401,F403
from .maps import __all__ as _maps_all
from .scalars import *  # noqa: F401,F403
from .scalars import __all__ as _scalars_all
from .solver import *  # noqa: F401,F403
from .solver import __all__ as _solver_all

__version__ = "0.1.0"

__all__ = [*_scalars_all, *_algebra_all, *_maps_all, *_solver_all, *_engine_all, *_formats_all]
