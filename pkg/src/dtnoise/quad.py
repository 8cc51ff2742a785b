"""Vectorized adaptive Gauss-Legendre quadrature on panels.

The integrators here are tuned for integrands of the form
``envelope(omega) * trig(omega * tau)`` evaluated for a batch of lags at once:
the callable receives a 1D array of abscissae and returns an array whose
last axis matches it (leading axes index the batch).
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureNonConvergent

__all__ = [
    "panel_edges",
    "integrate_panels",
    "integrate_half_line",
    "alternating_sum",
]

_LOW = np.polynomial.legendre.leggauss(12)
_HIGH = np.polynomial.legendre.leggauss(24)
_CHUNK = 4096


def panel_edges(lo, hi, width, breakpoints=()):
    """Uniform panel edges on ``[lo, hi]`` refined to include breakpoints."""
    n = max(1, int(np.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, n + 1)
    bp = [b for b in breakpoints if lo < b < hi]
    if bp:
        edges = np.union1d(edges, bp)
    # drop slivers produced by breakpoints sitting next to a uniform edge
    keep = np.concatenate(([True], np.diff(edges) > 1e-12 * max(1.0, abs(hi))))
    keep[-1] = True
    return edges[keep]


def _rule(f, a, b, nodes, weights):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    y = np.asarray(f(x), dtype=float)
    y = y.reshape(y.shape[:-1] + (a.size, nodes.size))
    return (y @ weights) * half, (np.abs(y) @ weights) * half


def _rule_chunked(f, a, b, nodes, weights):
    if a.size <= _CHUNK:
        return _rule(f, a, b, nodes, weights)
    parts = [_rule(f, a[i:i + _CHUNK], b[i:i + _CHUNK], nodes, weights)
             for i in range(0, a.size, _CHUNK)]
    return (np.concatenate([p[0] for p in parts], axis=-1),
            np.concatenate([p[1] for p in parts], axis=-1))


def _accumulate(vals, group, ngroups):
    out = np.zeros(vals.shape[:-1] + (ngroups,))
    flat = out.reshape(-1, ngroups)
    for row, v in zip(flat, vals.reshape(-1, vals.shape[-1])):
        row += np.bincount(group, weights=v, minlength=ngroups)
    return out


def integrate_panels(f, edges, abstol=1e-12, max_depth=40, groups=None):
    """Integrate ``f`` over the union of panels given by ``edges``.

    Each panel is evaluated with 12- and 24-point Gauss-Legendre rules; the
    difference serves as a (pessimistic) error estimate for the 24-point
    value. Panels failing their share of ``abstol`` are bisected.

    Parameters
    ----------
    f : callable
        Vectorized integrand; output's last axis follows the abscissae.
    edges : array_like
        Increasing panel boundaries.
    abstol : float
        Absolute tolerance for the whole interval.
    max_depth : int
        Maximum number of bisection passes.
    groups : array_like, optional
        Increasing boundaries of sub-intervals (each a union of panels); when
        given, one integral per sub-interval is returned along a new last axis.

    Returns
    -------
    value, err : ndarray
        Arrays shaped like the leading axes of ``f``'s output (plus the
        group axis when ``groups`` is given).
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    total = edges[-1] - edges[0]
    if total <= 0:
        shape = np.asarray(f(np.zeros(1))).shape[:-1]
        return np.zeros(shape), np.zeros(shape)
    if groups is not None:
        groups = np.asarray(groups, dtype=float)
        ngroups = groups.size - 1
    value = 0.0
    err = 0.0
    for _ in range(max_depth):
        lo, _ = _rule_chunked(f, a, b, *_LOW)
        hi, mag = _rule_chunked(f, a, b, *_HIGH)
        diff = np.abs(hi - lo)
        local = abstol * (b - a) / total
        floor = 1e-14 * mag
        ok = diff <= np.maximum(local, floor)
        if ok.ndim > 1:
            ok = ok.reshape(-1, ok.shape[-1]).all(axis=0)
        e = np.minimum(diff[..., ok], np.abs(hi[..., ok]))
        if groups is None:
            value = value + hi[..., ok].sum(axis=-1)
            err = err + e.sum(axis=-1)
        else:
            g = np.searchsorted(groups, 0.5 * (a[ok] + b[ok])) - 1
            value = value + _accumulate(hi[..., ok], g, ngroups)
            err = err + _accumulate(e, g, ngroups)
        if ok.all():
            return value, err
        a, b = a[~ok], b[~ok]
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        order = np.argsort(a, kind="stable")
        a, b = a[order], b[order]
    raise QuadratureNonConvergent(
        f"{a.size} panels still above tolerance after {max_depth} bisections")


def integrate_half_line(f, *, width, support=(0.0, np.inf), breakpoints=(),
                        decay=None, period=2 * np.pi, tail_tol=1e-12,
                        abstol=1e-12, oscillatory=True):
    """Integrate ``f`` over ``[support[0], support[1]]`` with a tail model.

    For finite support this is :func:`integrate_panels`. For infinite support
    the integral is computed up to a period-aligned cutoff ``Omega`` and
    ``2 * Omega``, and the difference is Richardson-extrapolated assuming a
    tail ``~ Omega**(-decay)``, where ``decay`` is the power-law decay
    exponent of the integrand envelope. That rate holds for zero-mean
    periodic oscillations sampled at period-aligned cutoffs; pass
    ``oscillatory=False`` for a non-negative integrand (e.g. a squared
    modulus), whose tail decays like ``Omega**(1 - decay)`` instead.

    Returns
    -------
    value, err : ndarray
    """
    lo, hi = support
    if np.isfinite(hi):
        return integrate_panels(f, panel_edges(lo, hi, width, breakpoints), abstol)
    if decay is None or decay <= 1:
        raise ValueError("non-integrable envelope")
    # cutoff where the envelope tail drops below tail_tol, rounded up to a period
    omega = tail_tol ** (-1.0 / (decay - 1))
    omega = period * max(4, int(np.ceil(min(omega, 2.0e4) / period)))
    v1, e1 = integrate_panels(f, panel_edges(lo, omega, width, breakpoints), abstol)
    v2, e2 = integrate_panels(f, panel_edges(omega, 2 * omega, width, breakpoints), abstol)
    v2 = v1 + v2
    # oscillatory tails scale like Omega**-decay on period-aligned cutoffs
    p = decay if oscillatory else decay - 1
    corr = (v2 - v1) / (2.0 ** p - 1.0)
    return v2 + corr, e1 + e2 + np.abs(corr)


def alternating_sum(terms, levels=12):
    """Sum a (nearly) alternating series by repeated averaging of partial sums.

    Parameters
    ----------
    terms : array_like
        Series terms along the last axis.
    levels : int
        Number of averaging passes over the trailing partial sums.

    Returns
    -------
    value, err : ndarray
        Accelerated sum and the size of the last averaging correction.
    """
    s = np.cumsum(np.asarray(terms, dtype=float), axis=-1)
    tail = s[..., -(levels + 2):]
    prev = tail
    for _ in range(levels):
        prev, tail = tail, 0.5 * (tail[..., 1:] + tail[..., :-1])
    value = tail[..., -1]
    err = np.abs(value - prev[..., -1])
    return value, err
