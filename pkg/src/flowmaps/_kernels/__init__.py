"""Invariant-sum kernels: compiled extension with a numpy fallback.

The compiled module is used when present; set FLOWMAPS_KERNEL=python to
force the fallback (the benchmark does this to compare the two).
"""

import os

from . import _minors_py

_forced = os.environ.get("FLOWMAPS_KERNEL", "").strip().lower()

if _forced in ("python", "py", "numpy"):
    _impl = _minors_py
    BACKEND = "python"
elif _forced in ("", "cython", "c"):
    try:
        from . import _minors_cy as _impl

        BACKEND = "cython"
    except ImportError:
        if _forced:
            raise
        _impl = _minors_py
        BACKEND = "python"
else:
    raise ValueError(f"FLOWMAPS_KERNEL={_forced!r} not recognized (use 'cython' or 'python')")


def backend() -> str:
    """Name of the kernel implementation selected at import."""
    return BACKEND


def invariants_2d(A, Ap, y, dv, grho):
    return _impl.invariants_2d(A, Ap, y, dv, grho)


def invariants_3d(A, Ap, y, dv, grho):
    return _impl.invariants_3d(A, Ap, y, dv, grho)
