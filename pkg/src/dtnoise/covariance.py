"""Covariances of dual-tree wavelet coefficients of stationary noise.

For a zero-mean stationary noise with autocovariance ``Gamma_n`` the
coefficient sequences at level ``j`` satisfy

    E{a[k + l] b[k]} = int Gamma_n(x) gamma_{a,b}(x / M**j - l) dx,

with ``gamma_{a,b}`` the deterministic cross-correlation of the two basis
functions. White noise collapses the integral to ``sigma2 * gamma(-l)``.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import quad
from .errors import (GammaDomainExceeded, InvalidParam, InvalidSubband,
                     NotIntegrable, NotSeparable)

__all__ = [
    "NoiseModel",
    "SeparableNoise",
    "CovSequence1D",
    "CovField2D",
    "PostTransformPair",
    "cov_1d",
    "cov_2d",
    "post_transform_cov",
    "coarse_limit",
    "coarse_convergence",
    "verify_cov_decay",
    "load_noise_table",
]

KINDS = ("primal_primal", "dual_dual", "primal_dual")


@dataclass(frozen=True)
class NoiseModel:
    """Stationary noise: white, exponential decay, or tabulated autocovariance.

    Use :meth:`white`, :meth:`exponential` or :meth:`tabulated`.
    """

    kind: str
    sigma2: float = 1.0
    A: float = 1.0
    alpha: float = 1.0
    table_tau: tuple | None = None
    table_gamma: tuple | None = None
    _spline: object = field(default=None, compare=False, repr=False)

    @classmethod
    def white(cls, sigma2=1.0):
        if not sigma2 > 0:
            raise InvalidParam("sigma2 must be positive")
        return cls("white", sigma2=float(sigma2))

    @classmethod
    def exponential(cls, A=1.0, alpha=1.0):
        if not (A > 0 and alpha > 0):
            raise InvalidParam("A and alpha must be positive")
        return cls("exponential", A=float(A), alpha=float(alpha))

    @classmethod
    def tabulated(cls, tau, gamma_n):
        """Autocovariance samples on a uniform grid of non-negative lags.

        A symmetric table is reduced to its ``tau >= 0`` half. The function
        is interpolated by a cubic spline and extended by zero.
        """
        tau = np.asarray(tau, dtype=float)
        g = np.asarray(gamma_n, dtype=float)
        if tau.ndim != 1 or tau.shape != g.shape or tau.size < 4:
            raise InvalidParam("need matching 1D tau/gamma_n columns (>= 4 rows)")
        order = np.argsort(tau)
        tau, g = tau[order], g[order]
        if tau[0] < 0:
            keep = tau >= 0
            tau, g = tau[keep], g[keep]
        step = np.diff(tau)
        if tau[0] != 0 or not np.allclose(step, step[0], rtol=1e-9, atol=1e-12):
            raise InvalidParam("tabulated tau must start at 0 with uniform spacing")
        if np.any(np.abs(g[1:]) > g[0] * (1 + 1e-12)):
            raise InvalidParam("Gamma_n(0) must dominate |Gamma_n(tau)|")
        if abs(g[-1]) > 1e-6 * g[0]:
            warnings.warn("tabulated Gamma_n is extended by zero beyond "
                          f"tau = {tau[-1]:g} where it is still {g[-1]:.3e}", stacklevel=2)
        # even extension so the spline has zero slope at the origin
        full_t = np.concatenate((-tau[:0:-1], tau))
        full_g = np.concatenate((g[:0:-1], g))
        spline = CubicSpline(full_t, full_g)
        return cls("tabulated", table_tau=tuple(tau), table_gamma=tuple(g), _spline=spline)

    # covariance and spectrum at zero
    def autocov(self, tau):
        tau = np.abs(np.asarray(tau, dtype=float))
        if self.kind == "white":
            raise InvalidParam("white noise has no pointwise autocovariance")
        if self.kind == "exponential":
            return self.A * np.exp(-self.alpha * tau)
        tmax = self.table_tau[-1]
        return np.where(tau <= tmax, self._spline(np.minimum(tau, tmax)), 0.0)

    @property
    def variance(self):
        if self.kind == "white":
            return self.sigma2
        if self.kind == "exponential":
            return self.A
        return self.table_gamma[0]

    def spectral_density_zero(self):
        """``int Gamma_n(x) dx``: closed form (exponential) or trapezoid (table)."""
        if self.kind == "white":
            return self.sigma2
        if self.kind == "exponential":
            return 2 * self.A / self.alpha
        tau = np.asarray(self.table_tau)
        g = np.asarray(self.table_gamma)
        if abs(g[-1]) > 1e-6 * g[0]:
            raise NotIntegrable(
                f"tabulated Gamma_n has not decayed at the grid edge ({g[-1]:.3e})")
        return 2 * np.trapezoid(g, tau)

    def support_radius(self):
        """Half-width beyond which ``|Gamma_n| < 1e-12 * Gamma_n(0)``."""
        if self.kind == "exponential":
            return np.log(1e12) / self.alpha
        if self.kind == "tabulated":
            return self.table_tau[-1]
        return 0.0

    def breakpoints(self):
        if self.kind == "tabulated":
            return tuple(self.table_tau) + tuple(-t for t in self.table_tau)
        return (0.0,)

    def scale(self):
        """Characteristic correlation length (used for panel widths)."""
        if self.kind == "exponential":
            return 1.0 / self.alpha
        if self.kind == "tabulated":
            return self.table_tau[1] - self.table_tau[0]
        return 1.0


@dataclass(frozen=True)
class SeparableNoise:
    """2D noise with ``Gamma_n(x1, x2) = Gamma_1(x1) * Gamma_2(x2)``."""

    factors: tuple

    def __post_init__(self):
        if len(self.factors) != 2:
            raise InvalidParam("a separable 2D model needs two 1D factors")


def load_noise_table(path):
    """Read a two-column ``tau,gamma_n`` CSV into a tabulated :class:`NoiseModel`."""
    taus, vals = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                t, g = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not taus:
                    continue  # header line
                raise InvalidParam(f"bad noise table row {row!r}") from None
            taus.append(t)
            vals.append(g)
    return NoiseModel.tabulated(taus, vals)


@dataclass
class CovSequence1D:
    j: int
    m: int
    mprime: int
    kind: str
    lags: np.ndarray
    values: np.ndarray
    abs_err: np.ndarray | float = 0.0


@dataclass
class CovField2D:
    j: int
    m: tuple
    mprime: tuple
    kind: str
    lags1: np.ndarray
    lags2: np.ndarray
    values: np.ndarray
    post_transform: str | None = None


@dataclass
class PostTransformPair:
    ww: CovField2D
    whwh: CovField2D
    wwh: CovField2D


def _white_1d(noise, provider, m, mprime, lags, kind):
    if kind == "primal_dual":
        return noise.sigma2 * np.asarray(provider(-lags), dtype=float)
    # orthonormality of the primal (and of the dual) basis
    return noise.sigma2 * np.where((lags == 0) & (m == mprime), 1.0, 0.0)


def _colored_1d(noise, provider, j, M, lags, abstol):
    scale = float(M) ** j
    X = noise.support_radius()
    # gamma(x / M**j - l) oscillates on the unit scale of its argument
    width = min(scale / 4, noise.scale() / 2, X / 8)

    def integrand(x):
        arg = x[None, :] / scale - lags[:, None]
        try:
            g = np.asarray(provider(arg), dtype=float)
        except (ValueError, FloatingPointError) as exc:
            raise GammaDomainExceeded(str(exc)) from exc
        return noise.autocov(x)[None, :] * g

    edges = quad.panel_edges(-X, X, width, noise.breakpoints())
    return quad.integrate_panels(integrand, edges, abstol=abstol)


def cov_1d(noise, provider, j, m, mprime, lags, kind="primal_dual", M=None,
           primal_provider=None):
    """Covariance sequence of level-``j`` coefficients of a stationary noise.

    Parameters
    ----------
    noise : NoiseModel
    provider : callable
        ``tau -> gamma_{psi_m, psi_mprime^H}(tau)`` on real arrays (see
        :func:`dtnoise.xcorr.gamma_provider`); it carries ``family`` for ``M``.
    j : int
        Resolution level (any integer).
    m, mprime : int
    lags : array_like of int
    kind : {"primal_dual", "primal_primal", "dual_dual"}
    M : int, optional
        Band count; taken from ``provider.family`` when omitted.
    primal_provider : callable, optional
        ``gamma_{psi_m, psi_mprime}`` for colored primal/primal (and dual/dual)
        covariances.

    Returns
    -------
    CovSequence1D
    """
    if kind not in KINDS:
        raise InvalidParam(f"kind must be one of {KINDS}")
    lags = np.atleast_1d(np.asarray(lags))
    if np.any(lags != np.round(lags)):
        raise InvalidParam("coefficient lags are integers")
    lags = np.round(lags).astype(np.int64)
    if M is None:
        M = provider.family.M
    if noise.kind == "white":
        vals = _white_1d(noise, provider, m, mprime, lags, kind)
        return CovSequence1D(j, m, mprime, kind, lags, vals, 0.0)
    if kind == "primal_dual":
        prov = provider
    else:
        if primal_provider is None:
            raise InvalidParam("colored primal/primal covariances need primal_provider")
        prov = primal_provider
    tol = 1e-7 * noise.variance
    vals, err = _colored_1d(noise, prov, j, M, lags.astype(float), tol)
    return CovSequence1D(j, m, mprime, kind, lags, vals, err)


def cov_2d(noise, providers, j, m, mprime, lags1, lags2, kind="primal_dual", M=None):
    """Covariance field of level-``j`` 2D coefficients for a separable noise.

    ``providers`` holds one correlation provider per axis. White noise gives
    ``sigma2 * gamma_1(-l1) * gamma_2(-l2)``.
    """
    if isinstance(noise, NoiseModel):
        if noise.kind != "white":
            raise NotSeparable("2D colored noise must be given as SeparableNoise")
        factors = (noise, NoiseModel.white(1.0))
    elif isinstance(noise, SeparableNoise):
        factors = noise.factors
        if any(f.kind == "white" for f in factors) and not all(f.kind == "white" for f in factors):
            raise NotSeparable("cannot mix white and colored axis factors")
    else:
        raise NotSeparable(f"unsupported 2D noise model {type(noise).__name__}")
    f1 = cov_1d(factors[0], providers[0], j, m[0], mprime[0], lags1, kind, M)
    f2 = cov_1d(factors[1], providers[1], j, m[1], mprime[1], lags2, kind, M)
    values = np.multiply.outer(f1.values, f2.values)
    return CovField2D(j, tuple(m), tuple(mprime), kind, f1.lags, f2.lags, values)


def post_transform_cov(field_nn, field_nh):
    """Covariances after the unitary ``(n +- n^H) / sqrt(2)`` detail transform.

    Parameters
    ----------
    field_nn : CovField2D
        Primal/primal field of the detail subband (equal to the dual/dual one).
    field_nh : CovField2D
        Primal/dual field of the same subband.

    Returns
    -------
    PostTransformPair
        ``ww = nn + nh``, ``whwh = nn - nh`` and an identically zero ``wwh``.
    """
    m = field_nh.m
    if 0 in m:
        raise InvalidSubband("the post-transform applies to detail subbands only")
    nn, nh = field_nn.values, field_nh.values
    mk = lambda v, tag: CovField2D(field_nh.j, m, m, "post", field_nh.lags1,
                                   field_nh.lags2, v, tag)
    return PostTransformPair(mk(nn + nh, "ww"), mk(nn - nh, "whwh"),
                             mk(np.zeros_like(nh), "wwh"))


def coarse_limit(noise, provider, m, mprime, lags):
    """White-noise limit ``Gamma_hat_n(0) * gamma(-l)`` at coarse resolution."""
    if noise.kind == "white":
        raise InvalidParam("white noise is its own coarse limit")
    lags = np.atleast_1d(np.asarray(lags, dtype=float))
    return noise.spectral_density_zero() * np.asarray(provider(-lags), dtype=float)


def coarse_convergence(noise, provider, m, mprime, lags, levels, M=None):
    """Relative max-lag error of ``cov_1d`` to :func:`coarse_limit` per level.

    Returns
    -------
    ndarray
        ``max_l |Gamma_j[l] - limit[l]| / max_l |limit[l]|`` for each level.
    """
    lim = coarse_limit(noise, provider, m, mprime, lags)
    ref = np.max(np.abs(lim))
    out = []
    for j in levels:
        seq = cov_1d(noise, provider, j, m, mprime, lags, "primal_dual", M)
        out.append(np.max(np.abs(seq.values - lim)) / ref)
    return np.array(out)


def verify_cov_decay(values, lags, N_m, start=8):
    """Empirical decay-bound report ``sup |Gamma[l]| (1 + |l|**(2N+1))``.

    Parameters
    ----------
    values : array_like
        1D sequence or 2D field (rows/columns indexed by ``lags``).
    lags : array_like
        Lags of a 1D sequence, or a pair ``(lags1, lags2)`` for a field.
    N_m : int or pair of int
        Vanishing-moment orders (one per axis for a field).

    Returns
    -------
    dict
        ``sup`` (weighted supremum), ``slope`` (log-log trend of the weighted
        sequence beyond ``start``) and ``passed``.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 2:
        l1, l2 = (np.asarray(l, dtype=float) for l in lags)
        n1, n2 = (N_m, N_m) if np.isscalar(N_m) else N_m
        w = (1 + np.abs(l1)[:, None] ** (2 * n1 + 1)) * (1 + np.abs(l2)[None, :] ** (2 * n2 + 1))
        weighted = np.abs(values) * w
        sup = float(np.max(weighted))
        # trend against the larger of the two lag magnitudes
        profile_l = np.maximum(np.abs(l1)[:, None], np.abs(l2)[None, :]).ravel()
        profile_w = weighted.ravel()
    else:
        l = np.asarray(lags, dtype=float)
        weighted = np.abs(values) * (1 + np.abs(l) ** (2 * N_m + 1))
        sup = float(np.max(weighted)) if weighted.size else 0.0
        profile_l, profile_w = np.abs(l), weighted
    if not np.isfinite(sup):
        return {"sup": sup, "slope": np.nan, "passed": False}
    if sup == 0.0:
        return {"sup": 0.0, "slope": 0.0, "passed": True}
    sel = (profile_l >= start) & (profile_w > 0)
    if sel.sum() < 2:
        return {"sup": sup, "slope": 0.0, "passed": True}
    order = np.argsort(profile_l[sel])
    x = np.log(profile_l[sel][order])
    y = np.log(profile_w[sel][order])
    slope = float(np.polyfit(x, y, 1)[0])
    return {"sup": sup, "slope": slope, "passed": bool(slope <= 0.1)}
