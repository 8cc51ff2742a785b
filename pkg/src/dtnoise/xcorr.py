"""Deterministic cross-correlations between primal and dual basis functions.

For real unit-norm functions ``f`` and ``g``,

    gamma_{f,g}(tau) = int f(x) g(x - tau) dx
                     = (1/pi) Re int_0^inf f_hat(w) conj(g_hat(w)) exp(1j w tau) dw.

Every routine here is vectorized over the lag ``tau``. Quadrature routines
return ``(value, abs_err)``; closed forms return values only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import sici

from . import quad
from .errors import (DegenerateFit, InvalidBand, InvalidParam, MissingLag,
                     PhaseUnavailable, UnknownBand)
from .spectra import (HilbertDualRule, WaveletFamily, dual_spectrum,
                      make_spectrum, meyer_window_sq)

__all__ = [
    "CorrelationSequence",
    "AsymptoticBound",
    "gamma_pair_quad",
    "gamma_mother_quad",
    "gamma_scaling_quad",
    "gamma_shannon",
    "gamma_shannon_closed",
    "meyer_I_eps",
    "gamma_meyer",
    "gamma_meyer_closed",
    "gamma_haar_closed",
    "haar_gamma1",
    "HAAR_GAMMA_A",
    "packet_recursion",
    "hadamard_gamma",
    "franklin_gamma_chi",
    "franklin_a1_autocorr",
    "franklin_gamma_mother",
    "franklin_gamma_scaling",
    "interband_gamma",
    "decay_exponent_fit",
    "has_closed_form",
    "gamma",
    "gamma_provider",
]

TWO_PI = 2.0 * np.pi
METHODS = ("quadrature", "closed_form", "packet_recursion")


@dataclass
class CorrelationSequence:
    """Cross-correlation ``gamma_{psi_m, psi_mprime^H}`` sampled on a lag grid."""

    family: WaveletFamily
    M: int
    d: int
    m: int
    mprime: int
    lags: np.ndarray
    values: np.ndarray
    method: str
    est_abs_error: np.ndarray = field(default=None)

    def __post_init__(self):
        self.lags = np.atleast_1d(np.asarray(self.lags, dtype=float))
        self.values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if self.est_abs_error is None:
            self.est_abs_error = np.zeros_like(self.values)
        self.est_abs_error = np.broadcast_to(
            np.asarray(self.est_abs_error, dtype=float), self.values.shape).copy()

    def at(self, tau):
        """Values at lags present on the grid (``MissingLag`` otherwise)."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        idx = np.searchsorted(self.lags, tau)
        idx = np.clip(idx, 0, self.lags.size - 1)
        hit = np.abs(self.lags[idx] - tau) <= 1e-9 * np.maximum(1, np.abs(tau))
        if not hit.all():
            raise MissingLag(f"lags {tau[~hit][:5]} not on the parent grid")
        return self.values[idx]


@dataclass
class AsymptoticBound:
    exponent: float
    leading_coeff: float | None
    valid_from: float
    residual: float = 0.0


# ---------------------------------------------------------------- quadrature


def _quad_setup(specs, taus):
    lo = max(s.band_support[0] for s in specs)
    hi = min(s.band_support[1] for s in specs)
    bps = sorted(set(b for s in specs for b in s.breakpoints))
    tmax = float(np.max(np.abs(taus))) if np.size(taus) else 0.0
    width = min(np.pi / 4, np.pi / (1.0 + tmax))
    decays = [s.decay for s in specs]
    decay = None if None in decays else sum(decays) / len(decays)
    period = max(s.period for s in specs)
    if any(s.dual is not None and s.m == 0 for s in specs):
        period = max(period, 2 * TWO_PI)
        if np.isfinite(hi):
            bps += [TWO_PI * k for k in range(1, int(hi / TWO_PI) + 1)]
    # panels must not straddle multiples of the alignment period
    width = min(width, period / 8)
    return (lo, hi), bps, width, decay, period


_TAU_BLOCK = 64


def gamma_pair_quad(f_spec, g_spec, taus, abstol=1e-11):
    """``gamma_{f,g}(tau)`` by quadrature of the Parseval integral.

    Parameters
    ----------
    f_spec, g_spec : WaveletSpectrum
        Spectra of the two functions (``g_spec`` is usually a dual).
    taus : array_like
        Real lags.

    Returns
    -------
    value, err : ndarray
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if taus.size > _TAU_BLOCK:
        # bound the (lags x nodes) phase matrix; sorting keeps small lags on wide panels
        order = np.argsort(np.abs(taus), kind="stable")
        val, err = np.empty_like(taus), np.empty_like(taus)
        for i in range(0, taus.size, _TAU_BLOCK):
            idx = order[i:i + _TAU_BLOCK]
            val[idx], err[idx] = gamma_pair_quad(f_spec, g_spec, taus[idx], abstol)
        return val, err
    support, bps, width, decay, period = _quad_setup((f_spec, g_spec), taus)
    if support[0] >= support[1]:
        return np.zeros_like(taus), np.zeros_like(taus)

    def integrand(w):
        prod = f_spec.eval_complex(w) * np.conj(g_spec.eval_complex(w))
        phase = np.exp(1j * np.outer(taus, w))
        return (prod[None, :] * phase).real / np.pi

    return quad.integrate_half_line(integrand, width=width, support=support,
                                    breakpoints=bps, decay=decay, period=period,
                                    abstol=abstol)


def gamma_mother_quad(spec_m, spec_mp, taus, d=0, abstol=1e-11):
    """Correlation of ``psi_m`` with the dual ``psi_mprime^H`` (``mprime != 0``).

    For ``m == mprime`` this integrates ``-(1/pi) |psi_hat_m|**2 sin(w tau)``,
    which needs no phase information.
    """
    if spec_mp.m == 0:
        raise InvalidBand("mprime must be a wavelet band; use gamma_scaling_quad")
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if spec_m.family == spec_mp.family and spec_m.m == spec_mp.m:
        support, bps, width, decay, period = _quad_setup((spec_m,), taus)

        def integrand(w):
            return -spec_m.eval_sq(w)[None, :] * np.sin(np.outer(taus, w)) / np.pi

        return quad.integrate_half_line(integrand, width=width, support=support,
                                        breakpoints=bps, decay=decay, period=period,
                                        abstol=abstol)
    return gamma_pair_quad(spec_m, dual_spectrum(spec_mp, HilbertDualRule(d)),
                           taus, abstol)


def gamma_scaling_quad(spec_m, taus, d=0, abstol=1e-11):
    """Correlation of ``psi_m`` with the dual scaling function ``psi_0^H``.

    For ``m == 0`` this is the alternating band sum
    ``(1/pi) sum_k (-1)**k int_{2k pi}^{2(k+1)pi} |psi_hat_0|**2 cos(w (1/2 + tau + d)) dw``.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if spec_m.m != 0:
        phi = make_spectrum(spec_m.family, 0, spec_m.depth)
        return gamma_pair_quad(spec_m, dual_spectrum(phi, HilbertDualRule(d)),
                               taus, abstol)
    dual = dual_spectrum(spec_m, HilbertDualRule(d))
    support, bps, width, decay, period = _quad_setup((spec_m, dual), taus)
    shift = taus + d + 0.5

    def integrand(w):
        sign = np.where(np.floor(w / TWO_PI) % 2 == 0, 1.0, -1.0)
        return (sign * spec_m.eval_sq(w))[None, :] * np.cos(np.outer(shift, w)) / np.pi

    return quad.integrate_half_line(integrand, width=width, support=support,
                                    breakpoints=bps, decay=decay, period=period,
                                    abstol=abstol)


# ---------------------------------------------------------------- Shannon


def _cos_diff_over_pitau(m, tau):
    # (cos((m+1) pi tau) - cos(m pi tau)) / (pi tau), finite at tau = 0
    return -np.sin(0.5 * np.pi * (2 * m + 1) * tau) * np.sinc(0.5 * tau)


def gamma_shannon(m, tau, d=0):
    """Real-lag Shannon correlation ``gamma_{psi_m, psi_m^H}(tau)``."""
    tau = np.asarray(tau, dtype=float)
    if m == 0:
        return np.sinc(tau + d + 0.5)
    return _cos_diff_over_pitau(m, tau)


def gamma_shannon_closed(m, lag, d=0):
    """Integer-lag Shannon correlation (exact rational multiples of 1/pi)."""
    lag = np.asarray(lag)
    if np.any(lag != np.round(lag)):
        raise InvalidParam("integer lags required; use gamma_shannon for real lags")
    lag = np.round(lag).astype(np.int64)
    if m == 0:
        n = d + lag
        return np.where(n % 2 == 0, 1.0, -1.0) / (np.pi * (n + 0.5))
    odd = lag % 2 != 0
    sign = np.where(((m + 1) * lag) % 2 == 0, 1.0, -1.0)
    safe = np.where(lag == 0, 1, lag)
    return np.where(odd, sign * 2.0 / (np.pi * safe), 0.0)


# ---------------------------------------------------------------- Meyer

_GL64 = np.polynomial.legendre.leggauss(64)


def meyer_I_eps(x, eps, window="poly7"):
    """``I_eps(x) = 2 eps int_0^1 W**2((1+t)/2) sin(pi eps x t) dt``.

    Composite 64-point Gauss-Legendre; the panel count grows with
    ``eps |x|`` so every panel sees at most two periods of the sine.
    """
    x = np.asarray(x, dtype=float)
    nodes, weights = _GL64
    npan = int(np.ceil(eps * np.max(np.abs(x), initial=0.0) / 4.0)) + 1
    edges = np.linspace(0.0, 1.0, npan + 1)
    h = np.diff(edges)
    t = (edges[:-1, None] + 0.5 * h[:, None] * (nodes + 1.0)).ravel()
    wt = (0.5 * h[:, None] * weights).ravel()
    w2 = meyer_window_sq(0.5 * (1.0 + t), window) * wt
    s = np.sin(np.pi * eps * np.multiply.outer(x, t))
    return 2.0 * eps * (s @ w2)


def gamma_meyer(m, tau, M, eps, d=0):
    """Real-lag Meyer correlation ``gamma_{psi_m, psi_m^H}(tau)``."""
    if not 0.0 < eps <= 1.0 / (M + 1) + 1e-15:
        raise InvalidParam(f"Meyer requires 0 < eps <= 1/(M+1), got {eps}")
    if not 0 <= m < M:
        raise UnknownBand(f"band {m} outside 0..{M - 1}")
    tau = np.asarray(tau, dtype=float)
    if m == 0:
        x = tau + d + 0.5
        return np.sinc(x) - np.sin(np.pi * x) * meyer_I_eps(x, eps)
    if m < M - 1:
        ie = meyer_I_eps(tau, eps)
        # (cos((m+1) pi t) - cos(m pi t)) * (1/(pi t) - I_eps(t))
        return _cos_diff_over_pitau(m, tau) - (
            np.cos(np.pi * (m + 1) * tau) - np.cos(np.pi * m * tau)) * ie
    return (_cos_diff_over_pitau(M - 1, tau)
            + np.cos(np.pi * (M - 1) * tau) * meyer_I_eps(tau, eps)
            - np.cos(np.pi * M * tau) * meyer_I_eps(tau, M * eps))


def gamma_meyer_closed(m, lag, M, eps, d=0):
    """Integer-lag Meyer correlation using the sign-pattern closed forms."""
    lag = np.asarray(lag)
    if np.any(lag != np.round(lag)):
        raise InvalidParam("integer lags required; use gamma_meyer for real lags")
    if not 0.0 < eps <= 1.0 / (M + 1) + 1e-15:
        raise InvalidParam(f"Meyer requires 0 < eps <= 1/(M+1), got {eps}")
    if not 0 <= m < M:
        raise UnknownBand(f"band {m} outside 0..{M - 1}")
    lag = np.round(lag).astype(np.int64)
    par = lambda n: np.where(n % 2 == 0, 1.0, -1.0)
    if m == 0:
        n = d + lag
        return par(n) * (1.0 / (np.pi * (n + 0.5)) - meyer_I_eps(n + 0.5, eps))
    safe = np.where(lag == 0, 1, lag).astype(float)
    if m < M - 1:
        val = par((m + 1) * lag) * (1 - par(lag)) * (1 / (np.pi * safe) - meyer_I_eps(safe, eps))
    else:
        val = par(M * lag) * ((1 - par(lag)) / (np.pi * safe)
                              + par(lag) * meyer_I_eps(safe, eps)
                              - meyer_I_eps(safe, M * eps))
    return np.where(lag == 0, 0.0, val)


# ---------------------------------------------------------------- Haar

# autocorrelations of the Haar half-filters, lags 0 and 1
HAAR_GAMMA_A = {0: (1.0, 0.5), 1: (1.0, -0.5)}


def _xlog(x):
    ax = np.abs(x)
    return np.where(ax > 0, x * np.log(np.where(ax > 0, ax, 1.0)), 0.0)


@lru_cache(maxsize=None)
def _haar1_series_coeffs(n=40):
    k = np.arange(2, n + 2)
    return k, 2.0 * (1.0 - 4.0 ** (1 - k)) / ((2 * k) * (2 * k - 1))


def haar_gamma1(tau):
    """Haar mother-wavelet correlation ``gamma_{psi_1, psi_1^H}(tau)``.

    Exact log-polynomial form for ``|tau| < 8``; beyond, the equivalent
    convergent expansion in odd powers of ``1/tau`` (no cancellation).
    """
    tau = np.asarray(tau, dtype=float)
    t = tau
    exact = (6 * _xlog(t) + _xlog(t + 1) + _xlog(t - 1)
             - 4 * _xlog(t + 0.5) - 4 * _xlog(t - 0.5)) / np.pi
    big = np.abs(t) >= 8
    if np.any(big):
        k, c = _haar1_series_coeffs()
        tb = np.where(big, t, 8.0)
        inv = 1.0 / tb
        series = (c * np.power.outer(inv, 2 * k - 1)).sum(axis=-1) / np.pi
        return np.where(big, series, exact)
    return exact


def _haar_gamma0(tau, d=0, nterms=20000):
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    k = np.arange(nterms, dtype=float)
    sign = np.where(k % 2 == 0, 1.0, -1.0)

    def S(x):
        x = np.asarray(x)[:, None]
        return x * (sici((k + 1) * np.pi * x)[0] - sici(k * np.pi * x)[0])

    base = 2 * d + 2 * tau
    terms = sign * (0.5 * S(3 + base) - S(1 + base) + 0.5 * S(base - 1))
    val, err = quad.alternating_sum(terms)
    return val / np.pi, err / np.pi


def gamma_haar_closed(m, tau, d=0):
    """Haar correlation ``gamma_{psi_m, psi_m^H}(tau)`` for ``m`` in {0, 1}.

    ``m = 0`` sums the alternating sine-integral series; ``m = 1`` is the
    exact log-polynomial. Higher Walsh-Hadamard bands: :func:`hadamard_gamma`.
    """
    if m == 0:
        return _haar_gamma0(tau, d)[0].reshape(np.shape(tau))
    if m == 1:
        return haar_gamma1(tau)
    raise UnknownBand("closed Haar forms exist for m in {0, 1}; use hadamard_gamma")


def packet_recursion(parent, taus, parity, gamma_a=None):
    """Child-band correlation from the parent band of a two-band packet split.

    ``gamma_child(tau) = sum_k gamma_a[k] gamma_parent(2 tau - k)``, with the
    filter autocorrelation ``gamma_a`` even in ``k``.

    Parameters
    ----------
    parent : CorrelationSequence or callable
        Parent correlation on a grid covering every ``2 tau +- k``.
    taus : array_like
        Child lags.
    parity : {0, 1}
        0 for the child ``2m``, 1 for ``2m + 1``.
    gamma_a : sequence, optional
        ``gamma_a[0], gamma_a[1], ...``; defaults to the Haar half-filters.

    Returns
    -------
    CorrelationSequence or ndarray
        Same kind as ``parent``.
    """
    if parity not in (0, 1):
        raise InvalidParam("parity must be 0 (even child) or 1 (odd child)")
    if gamma_a is None:
        gamma_a = HAAR_GAMMA_A[parity]
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if isinstance(parent, CorrelationSequence):
        if parent.m == 0 or parent.mprime != parent.m:
            raise InvalidBand("packet recursion needs a diagonal parent band m >= 1")
        lookup = parent.at
    else:
        lookup = parent
    val = gamma_a[0] * lookup(2 * taus)
    for k in range(1, len(gamma_a)):
        if gamma_a[k]:
            val = val + gamma_a[k] * (lookup(2 * taus + k) + lookup(2 * taus - k))
    if isinstance(parent, CorrelationSequence):
        child = 2 * parent.m + parity
        err = np.max(parent.est_abs_error) * np.sum(np.abs(gamma_a) * np.r_[1, 2 * np.ones(len(gamma_a) - 1)])
        return CorrelationSequence(parent.family, parent.M, parent.d, child, child,
                                   taus, val, "packet_recursion", err)
    return val


def hadamard_gamma(m, tau):
    """Walsh-Hadamard packet correlation ``gamma_{psi_m, psi_m^H}(tau)``, ``m >= 1``.

    Applies the packet recursion along the binary digits of ``m`` down to the
    Haar mother wavelet.
    """
    if m < 1:
        raise InvalidBand("packet recursion is not valid for the scaling band")
    if m == 1:
        return haar_gamma1(tau)
    return packet_recursion(lambda t: hadamard_gamma(m // 2, t), tau, m % 2).reshape(np.shape(tau))


# ---------------------------------------------------------------- Franklin

_FRANKLIN_Q = (-35 / 16, 7 / 4, -7 / 8, 1 / 4, -1 / 32)


def _cube_log(x):
    ax = np.abs(x)
    return np.where(ax > 0, x ** 3 * np.log(np.where(ax > 0, ax, 1.0)), 0.0)


@lru_cache(maxsize=None)
def _chi_series_coeffs(n=40):
    q = _FRANKLIN_Q
    out = []
    for k in range(4, 4 + n):
        c = 2 * sum(q[p] * p ** (2 * k) for p in range(1, 5))
        out.append(c * 6 * math.factorial(2 * k - 4) / math.factorial(2 * k))
    return np.arange(4, 4 + n), np.array(out, dtype=float)


def franklin_gamma_chi(tau):
    """Correlation of the auxiliary spline ``chi`` with its Hilbert dual.

    Exact ``x**3 ln|x|`` combination for ``|tau| < 8``; beyond, the equivalent
    expansion in odd powers of ``1/tau``.
    """
    tau = np.asarray(tau, dtype=float)
    q = _FRANKLIN_Q
    exact = q[0] * _cube_log(tau)
    for p in range(1, 5):
        exact = exact + q[p] * (_cube_log(tau + p) + _cube_log(tau - p))
    exact = exact / (3 * np.pi)
    big = np.abs(tau) >= 8
    if np.any(big):
        k, c = _chi_series_coeffs()
        tb = np.where(big, tau, 8.0)
        series = (c * np.power.outer(1.0 / tb, 2 * k - 3)).sum(axis=-1) / (3 * np.pi)
        return np.where(big, series, exact)
    return exact


def franklin_a1_autocorr(k):
    """Autocorrelation of the Franklin high-pass auxiliary filter, even in ``k``."""
    k = np.abs(np.asarray(k, dtype=np.int64))
    r = 2.0 - math.sqrt(3.0)
    s3 = math.sqrt(3.0)
    h = k // 2
    sgn = np.where(h % 2 == 0, 1.0, -1.0)
    even = (2 * s3 / 9) * r ** h * (7 * sgn + 4 * r ** h)
    odd = (8 * s3 / 9) * r ** h * (sgn * (1 - s3) - r ** (h + 1))
    return np.where(k % 2 == 0, even, odd)


def franklin_gamma_mother(tau, tol=1e-13):
    """Franklin ``gamma_{psi_1, psi_1^H}(tau)`` via the ``chi`` expansion.

    The filter autocorrelation series is truncated once
    ``|gamma_a[k]| * sup|gamma_chi| < tol * (1 + |2 tau|)**-5``.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    sup = 0.05  # bound on |gamma_chi|
    target = tol * (1 + 2 * np.max(np.abs(tau))) ** -5
    kmax = 1
    while abs(franklin_a1_autocorr(kmax)) * sup >= target:
        kmax += 1
    ks = np.arange(1, kmax + 1)
    ga = franklin_a1_autocorr(ks)
    x = 2 * tau[:, None]
    val = franklin_a1_autocorr(0) * franklin_gamma_chi(x[:, 0])
    # pair symmetric terms before summing to limit cancellation error
    pairs = franklin_gamma_chi(x + ks) + franklin_gamma_chi(x - ks)
    val = val + (pairs * ga)[:, ::-1].sum(axis=1)
    return val


def franklin_gamma_scaling(tau, d=0, nbands=400, abstol=1e-13):
    """Franklin ``gamma_{psi_0, psi_0^H}(tau) = (6/pi) sum_k (-1)**k T_k(1 + 2d + 2tau)``.

    Returns
    -------
    value, err : ndarray
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    x = 1 + 2 * d + 2 * tau

    def integrand(u):
        env = np.sinc(u / np.pi) ** 4 / (1 + 2 * np.cos(u) ** 2)
        return env[None, :] * np.cos(np.outer(x, u))

    bands = np.pi * np.arange(nbands + 1)
    width = min(np.pi / 4, np.pi / (1 + np.max(np.abs(x))))
    T, Terr = quad.integrate_panels(integrand, quad.panel_edges(0, bands[-1], width, bands),
                                    abstol=abstol, groups=bands)
    sign = np.where(np.arange(nbands) % 2 == 0, 1.0, -1.0)
    val, accel = quad.alternating_sum(T * sign)
    return 6 / np.pi * val, 6 / np.pi * (accel + Terr.sum(axis=-1))


# ---------------------------------------------------------------- inter-band


def interband_gamma(spec_m, spec_mp, taus, d=0):
    """Inter-band correlation ``gamma_{psi_m, psi_mprime^H}`` for ``m != mprime``.

    Returns
    -------
    value, err : ndarray
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    fam = spec_m.family
    if spec_m.m == spec_mp.m:
        raise InvalidParam("interband_gamma needs m != mprime")
    if fam.kind == "shannon":
        # disjoint supports: exactly uncorrelated
        return np.zeros_like(taus), np.zeros_like(taus)
    if fam.kind == "meyer" and fam.phase_slopes is None:
        raise PhaseUnavailable("Meyer inter-band values need configured phase slopes")
    if spec_mp.m == 0:
        return gamma_scaling_quad(spec_m, taus, d)
    return gamma_pair_quad(spec_m, dual_spectrum(spec_mp, HilbertDualRule(d)), taus)


# ---------------------------------------------------------------- decay fit


def decay_exponent_fit(lags, values, min_points=8):
    """Least-squares power law ``|gamma| ~ C |tau|**-exponent``.

    Returns
    -------
    AsymptoticBound
        ``leading_coeff`` is the signed ``C`` (sign of the largest-lag value).
    """
    lags = np.asarray(lags, dtype=float)
    values = np.asarray(values, dtype=float)
    if lags.size < min_points:
        raise DegenerateFit(f"need at least {min_points} lags, got {lags.size}")
    if np.all(np.abs(values) < 1e-14):
        raise DegenerateFit("all values below 1e-14")
    keep = np.abs(values) > 0
    if keep.sum() < 2:
        raise DegenerateFit("fewer than two nonzero values")
    x = np.log(np.abs(lags[keep]))
    y = np.log(np.abs(values[keep]))
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), res, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(res[0] / x.size)) if res.size else 0.0
    sign = np.sign(values[keep][-1])
    return AsymptoticBound(-slope, sign * math.exp(icpt), float(lags.min()), resid)


# ---------------------------------------------------------------- dispatch


def has_closed_form(family, m, mprime):
    kind = family.kind
    if m != mprime:
        return kind == "shannon"
    if kind in ("shannon", "meyer"):
        return True
    if kind == "haar_packet":
        return m <= 1
    if kind == "franklin":
        return True
    return False


def _closed(family, m, taus, d):
    kind = family.kind
    integer = np.all(taus == np.round(taus))
    if kind == "shannon":
        return (gamma_shannon_closed(m, taus, d) if integer else gamma_shannon(m, taus, d)), 0.0
    if kind == "meyer":
        if integer:
            return gamma_meyer_closed(m, taus, family.M, family.epsilon, d), 0.0
        return gamma_meyer(m, taus, family.M, family.epsilon, d), 0.0
    if kind == "haar_packet":
        if m == 0:
            return _haar_gamma0(taus, d)
        return haar_gamma1(taus), 0.0
    if kind == "franklin":
        if m == 0:
            return franklin_gamma_scaling(taus, d)
        return franklin_gamma_mother(taus), 0.0
    raise InvalidParam(f"no closed form for {family.label} band {m}")


def gamma(family, m, mprime, taus, d=0, method="auto", depth=24):
    """``gamma_{psi_m, psi_mprime^H}`` on a lag grid.

    Parameters
    ----------
    family : WaveletFamily
    m, mprime : int
    taus : array_like
    d : int
        Delay of the dual scaling function.
    method : {"auto", "quadrature", "closed_form", "packet_recursion"}
        ``auto`` picks the closed form or recursion when one exists.

    Returns
    -------
    CorrelationSequence
    """
    M = family.M
    for b in (m, mprime):
        if not 0 <= b < M:
            raise UnknownBand(f"band {b} outside 0..{M - 1}")
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if method == "auto":
        if family.kind == "haar_packet" and m == mprime and m >= 2:
            method = "packet_recursion"
        elif has_closed_form(family, m, mprime):
            method = "closed_form"
        else:
            method = "quadrature"
    if method == "packet_recursion":
        if family.kind != "haar_packet" or m != mprime or m < 1:
            raise InvalidParam("packet recursion applies to Walsh-Hadamard bands m >= 1")
        val, err = hadamard_gamma(m, taus), 0.0
    elif method == "closed_form":
        if m != mprime:
            if family.kind != "shannon":
                raise InvalidParam(f"no closed inter-band form for {family.label}")
            val, err = np.zeros_like(taus), 0.0
        elif family.kind == "haar_packet" and m >= 2:
            val, err = hadamard_gamma(m, taus), 0.0
        else:
            val, err = _closed(family, m, taus, d)
    elif method == "quadrature":
        sm = make_spectrum(family, m, depth)
        if m != mprime:
            val, err = interband_gamma(sm, make_spectrum(family, mprime, depth), taus, d)
        elif m == 0:
            val, err = gamma_scaling_quad(sm, taus, d)
        else:
            val, err = gamma_mother_quad(sm, sm, taus, d)
    else:
        raise InvalidParam(f"unknown method {method!r}")
    return CorrelationSequence(family, M, d, m, mprime, taus, val, method, err)


def gamma_provider(family, m, mprime, d=0, method="auto"):
    """Callable ``tau -> gamma_{psi_m, psi_mprime^H}(tau)`` for real arrays."""

    def provider(tau):
        tau = np.asarray(tau, dtype=float)
        flat = tau.ravel()
        return gamma(family, m, mprime, flat, d, method).values.reshape(tau.shape)

    provider.family, provider.m, provider.mprime, provider.d = family, m, mprime, d
    return provider
