"""Kernel backend selection: compiled Cython extension with NumPy fallback.

The active backend is picked at import time (compiled if importable, else
pure Python) and can be overridden with the FASTR_BACKEND environment
variable or :func:`use`. Both backends implement ``contract_axis`` with
identical semantics; they may differ in the last floating-point bits because
of summation order.
"""

import os

from . import _kernels_py

_BACKENDS = {"python": _kernels_py}

try:
    from . import _kernels_cy

    _BACKENDS["compiled"] = _kernels_cy
except ImportError:
    pass

_active = os.environ.get("FASTR_BACKEND", "")
if _active not in _BACKENDS:
    _active = "compiled" if "compiled" in _BACKENDS else "python"


def available_backends():
    return tuple(sorted(_BACKENDS))


def active_backend():
    return _active


def use(name):
    """Select the kernel backend by name ('python' or 'compiled')."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {available_backends()}")
    _active = name


def contract_axis(arr, axis, v):
    return _BACKENDS[_active].contract_axis(arr, axis, v)
