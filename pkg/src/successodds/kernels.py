"""Kernel selection.

The compiled ``_ckernels`` extension is used when it imports and the inputs
fit in int64; otherwise the pure-Python module handles the call. Set
``SUCCESSODDS_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _pykernels

_INT64_MAX = 2**63 - 1

try:
    if os.environ.get("SUCCESSODDS_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernels requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"


def _fits(*seqs) -> bool:
    for s in seqs:
        if isinstance(s, np.ndarray) and s.dtype == np.int64:
            continue
        if len(s) and (max(s) > _INT64_MAX or min(s) < -_INT64_MAX):
            return False
    return True


def _impl(*seqs):
    if _ckernels is not None and _fits(*seqs):
        return _ckernels
    return _pykernels


def count_pairs_brute(a, b):
    return _impl(a, b).count_pairs_brute(a, b)


def count_pairs_merge(a, b):
    return _impl(a, b).count_pairs_merge(a, b)


def midranks2(values):
    return _impl(values).midranks2(values)
