"""Kernel backend selection.

The compiled extension is used when it was built; otherwise (or when the
environment variable ``DTNOISE_PURE_PYTHON`` is set to a non-empty value
other than ``0``) the numpy fallback is used. Both expose identical
functions with identical results up to floating-point summation order.
"""

import os

import numpy as np

from . import _kernels_py

_force_py = os.environ.get("DTNOISE_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_py:
        raise ImportError("pure-python backend requested")
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

__all__ = ["BACKEND", "circular_xcov", "circular_xcov2d"]


def _lags(lags):
    return np.ascontiguousarray(np.atleast_1d(lags), dtype=np.int_)


def circular_xcov(a, b, lags, backend=None):
    """Circular biased cross-covariance estimate ``mean_k a[k + l] b[k]``."""
    impl = _kernels_py if backend == "python" else _impl
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    return np.asarray(impl.circular_xcov(a, b, _lags(lags)))


def circular_xcov2d(a, b, lags1, lags2, backend=None):
    """2D circular biased cross-covariance on the lag grid ``lags1 x lags2``."""
    impl = _kernels_py if backend == "python" else _impl
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    return np.asarray(impl.circular_xcov2d(a, b, _lags(lags1), _lags(lags2)))
