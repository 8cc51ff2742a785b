"""Pure numpy versions of the compiled kernels (same signatures)."""

import numpy as np


def circular_xcov(a, b, lags):
    """``out[i] = mean_k a[(k + lags[i]) % K] * b[k]``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.array([np.mean(np.roll(a, -int(s)) * b) for s in lags])


def circular_xcov2d(a, b, lags1, lags2):
    """2D analogue of :func:`circular_xcov` on a lag grid ``lags1 x lags2``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty((len(lags1), len(lags2)))
    for i, s1 in enumerate(lags1):
        rolled = np.roll(a, -int(s1), axis=0)
        for k, s2 in enumerate(lags2):
            out[i, k] = np.mean(np.roll(rolled, -int(s2), axis=1) * b)
    return out
