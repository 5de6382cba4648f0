"""Kernel backend selection.

Two interchangeable kernel modules exist: ``_kernels_numpy`` (pure numpy
reference) and ``_kernels_numba`` (compiled mirror).  The active backend is
chosen by, in order of precedence:

1. an explicit ``name`` argument to :func:`get_kernels`,
2. a process-wide override installed with :func:`set_backend`,
3. the ``MEDIANLAB_BACKEND`` environment variable (``auto``, ``numba`` or
   ``numpy``; default ``auto``),
4. ``auto`` resolves to numba when importable, else numpy.

Both backends return identical values and witnesses; numba is just faster.
"""
from __future__ import annotations

import os

from . import _kernels_numpy
from .errors import InvalidParams

try:
    from . import _kernels_numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _kernels_numba = None
    HAS_NUMBA = False

_VALID = ("auto", "numba", "numpy")
_override: str | None = None


def resolve_name(name: str | None = None) -> str:
    """Resolve the backend that would be used, as ``"numba"`` or ``"numpy"``."""
    choice = name or _override or os.environ.get("MEDIANLAB_BACKEND", "auto")
    choice = choice.strip().lower()
    if choice not in _VALID:
        raise InvalidParams(
            f"unknown backend {choice!r}; expected one of {', '.join(_VALID)}"
        )
    if choice == "auto":
        return "numba" if HAS_NUMBA else "numpy"
    if choice == "numba" and not HAS_NUMBA:
        raise InvalidParams("numba backend requested but numba is not importable")
    return choice


def get_kernels(name: str | None = None):
    """Return the active kernel module."""
    return _kernels_numba if resolve_name(name) == "numba" else _kernels_numpy


def set_backend(name: str | None) -> None:
    """Install (or with ``None`` clear) a process-wide backend override."""
    global _override
    if name is not None:
        resolve_name(name)  # validate eagerly
    _override = name


def active_backend() -> str:
    """Name of the backend currently in effect."""
    return resolve_name()
