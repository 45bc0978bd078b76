"""Kernel backend selection.

The propagator's two hot spots — the pointwise pair rotation and the
sequential slaved-probe scan — exist in two interchangeable implementations:
numba-compiled (:mod:`incoupler.kernels_numba`) and pure numpy
(:mod:`incoupler.kernels_numpy`). The environment variable
``INCOUPLER_NUMBA`` picks the path at import time:

* unset or ``auto`` — use numba when importable, else fall back to numpy;
* ``1`` / ``true`` / ``numba`` — require numba (ImportError surfaces);
* ``0`` / ``false`` / ``numpy`` — force the pure-numpy path.

``backend_name()`` reports which path is active; ``get_backend(name)``
returns a specific module for side-by-side testing and benchmarking.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import kernels_numpy

__all__ = ["pair_rotate", "qs_scan", "backend_name", "get_backend", "available_backends"]

_FORCE_NUMPY = ("0", "false", "off", "numpy")
_FORCE_NUMBA = ("1", "true", "on", "numba", "require")


def _select() -> tuple[ModuleType, str]:
    flag = os.environ.get("INCOUPLER_NUMBA", "auto").strip().lower()
    if flag in _FORCE_NUMPY:
        return kernels_numpy, "numpy"
    if flag in _FORCE_NUMBA:
        from . import kernels_numba

        return kernels_numba, "numba"
    try:
        from . import kernels_numba

        return kernels_numba, "numba"
    except ImportError:
        return kernels_numpy, "numpy"


_BACKEND, _NAME = _select()

pair_rotate = _BACKEND.pair_rotate
qs_scan = _BACKEND.qs_scan


def backend_name() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return _NAME


def available_backends() -> tuple[str, ...]:
    """Backends importable in this environment."""
    names = ["numpy"]
    try:
        from . import kernels_numba  # noqa: F401

        names.insert(0, "numba")
    except ImportError:
        pass
    return tuple(names)


def get_backend(name: str) -> ModuleType:
    """Return a kernel module by name for testing/benchmarking."""
    if name == "numpy":
        return kernels_numpy
    if name == "numba":
        from . import kernels_numba

        return kernels_numba
    raise ValueError(f"unknown backend {name!r}")
