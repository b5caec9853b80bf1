"""Kernel backend selection.

The compiled kernel (``prefevo._core``) is preferred when importable; the
pure-Python twin is the fallback. Both produce bit-identical results, so the
choice only affects speed. Set ``PREFEVO_BACKEND=python`` or ``=compiled`` to
force one at import time, or call :func:`set_backend` (used by the benchmark
and the cross-backend tests).
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _purepy

__all__ = ["active", "active_name", "available", "set_backend"]

_backends: dict[str, ModuleType] = {"python": _purepy}
try:
    from . import _core  # type: ignore[attr-defined]

    _backends["compiled"] = _core
except ImportError:
    pass


def _initial() -> ModuleType:
    forced = os.environ.get("PREFEVO_BACKEND")
    if forced:
        if forced not in _backends:
            raise ImportError(
                f"PREFEVO_BACKEND={forced!r} requested but only "
                f"{sorted(_backends)} available"
            )
        return _backends[forced]
    return _backends.get("compiled", _purepy)


_active: ModuleType = _initial()


def available() -> tuple[str, ...]:
    """Names of the importable backends."""
    return tuple(sorted(_backends))


def active() -> ModuleType:
    """Currently selected kernel module."""
    return _active


def active_name() -> str:
    return _active.BACKEND_NAME


def set_backend(name: str) -> None:
    """Switch kernels (benchmarks/tests). Not safe mid-run."""
    global _active
    if name not in _backends:
        raise ValueError(f"unknown backend {name!r}; available: {sorted(_backends)}")
    _active = _backends[name]
