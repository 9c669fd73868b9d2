"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set RTF_LAB_PURE=1 to force the numpy implementation.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("RTF_LAB_THREADS"):
    os.environ.setdefault("OMP_NUM_THREADS", os.environ["RTF_LAB_THREADS"])

BACKEND = "python"
_impl = _pykernels
if os.environ.get("RTF_LAB_PURE", "") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels


def _c(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def conv(A, B, L, add, mul):
    return _impl.conv(_c(A), _c(B), int(L), add, mul)


def first_nonzero(D):
    return _impl.first_nonzero(_c(D))


def inv_units(D, add, mul, neg, inv):
    return _impl.inv_units(_c(D), add, mul, neg, inv)


def threads():
    """Thread cap from RTF_LAB_THREADS (None when unset)."""
    v = os.environ.get("RTF_LAB_THREADS")
    return int(v) if v else None
