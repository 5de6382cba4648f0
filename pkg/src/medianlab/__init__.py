"""medianlab: a laboratory for median and coarse median operators on finite
graph metric spaces."""
from __future__ import annotations

from ._backend import HAS_NUMBA, active_backend, set_backend
from .errors import *  # noqa: F401,F403 - re-export the error hierarchy

__version__ = "0.1.0"
