"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when
``NORMSKETCH_BACKEND=python`` is set, the NumPy fallback is used.
"""
import contextlib
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled


def _default():
    wanted = os.environ.get("NORMSKETCH_BACKEND", "").strip().lower()
    if wanted:
        if wanted not in _BACKENDS:
            raise ImportError(f"normsketch backend {wanted!r} is not available")
        return _BACKENDS[wanted]
    return _BACKENDS.get("cython", _kernels_py)


_active = _default()


def kernels():
    return _active


def available():
    return sorted(_BACKENDS)


def set_backend(name):
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available()}")
    _active = _BACKENDS[name]


@contextlib.contextmanager
def use_backend(name):
    """Temporarily switch the active kernel backend."""
    global _active
    prev = _active
    set_backend(name)
    try:
        yield _active
    finally:
        _active = prev
