"""Monte Carlo estimation of coefficient covariances.

Noise is synthesized on a uniform grid of spacing ``dx = M / R`` (``R`` grid
points per unit of the level-1 wavelet argument). Coefficients are analog
inner products with the dilated basis functions, computed exactly for the
periodized noise in the discrete Fourier domain:

    c[k] = dx * sum_i n[i] f(x_i - k M**j)  =  ifft(fft(n) * conj(F))[k M**(j-1) R]

with ``F(w) = M**(j/2) psi_hat(M**j w)`` (or the dual spectrum).
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .covariance import NoiseModel, SeparableNoise
from .errors import InvalidParam, NonPositiveDefinite, SupportTruncated
from .spectra import HilbertDualRule, WaveletFamily, dual_spectrum, make_spectrum

__all__ = [
    "SimConfig",
    "MCEstimate",
    "MCField2D",
    "synth_noise",
    "sample_wavelet",
    "level_coefficients",
    "mc_run_1d",
    "mc_run_2d",
    "default_2d_config",
    "retained_energy",
]

KINDS = ("primal_dual", "primal_primal", "dual_dual")


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo design.

    Attributes
    ----------
    family : WaveletFamily
    J : int
        Coarsest level.
    L : int
        Samples per side; floored to a multiple of ``M**(J-1) * R``.
    R : int
        Grid points per unit of the level-1 wavelet argument.
    runs : int
    base_seed : int
        Run ``r`` uses seed ``base_seed + r``.
    d : int
        Delay of the dual scaling function.
    boundary : {"periodic", "discard"}
        ``discard`` drops coefficients whose effective support wraps around.
    dims : {1, 2}
    """

    family: WaveletFamily
    J: int = 3
    L: int = 2 ** 14
    R: int = 16
    runs: int = 100
    base_seed: int = 0
    d: int = 0
    boundary: str = "periodic"
    dims: int = 1

    def __post_init__(self):
        M = self.family.M
        if self.runs < 2:
            raise InvalidParam("runs >= 2 required for a standard error")
        if self.J < 1 or int(self.R) != self.R or self.R < 1:
            raise InvalidParam("need J >= 1 and a positive integer R")
        if self.boundary not in ("periodic", "discard"):
            raise InvalidParam("boundary must be 'periodic' or 'discard'")
        if self.dims not in (1, 2):
            raise InvalidParam("dims must be 1 or 2")
        if self.L_eff == 0:
            raise InvalidParam(f"L={self.L} shorter than one level-{self.J} step")
        ncoef = self.coefficients_at(self.J) ** self.dims
        if ncoef < 64:
            raise InvalidParam(f"only {ncoef} coefficients at level {self.J} (need >= 64)")
        # time-domain sampling fidelity needs R >= 8; band-limited spectral
        # projections only need the spectra inside the grid's Nyquist band
        if self.boundary == "discard" or not self.family.band_limited:
            if self.R < 8:
                raise InvalidParam("R >= 8 required")
        else:
            for j in self.levels:
                hi = max(make_spectrum(self.family, m).band_support[1] for m in range(M))
                if hi / M ** j > np.pi / self.dx + 1e-12:
                    raise InvalidParam(f"level {j} spectra exceed the grid Nyquist band")

    @property
    def M(self):
        return self.family.M

    @property
    def dx(self):
        return self.M / self.R

    def step(self, j):
        return self.M ** (j - 1) * self.R

    @property
    def L_eff(self):
        s = self.step(self.J)
        return (self.L // s) * s

    def coefficients_at(self, j):
        return self.L_eff // self.step(j)

    @property
    def levels(self):
        return tuple(range(1, self.J + 1)) if self.dims == 1 else (self.J,)


def default_2d_config(family, runs=100, base_seed=0, L=256, J=2):
    """2D desk-scale surrogate: unit sample spacing, ``L x L`` grid, level ``J``."""
    return SimConfig(family, J=J, L=L, R=family.M, runs=runs, base_seed=base_seed,
                     dims=2)


@dataclass
class MCEstimate:
    j: int
    m: int
    mprime: int
    kind: str
    lag: int
    mean: float
    stderr: float
    runs: int


@dataclass
class MCField2D:
    j: int
    m: tuple
    kind: str
    lags1: np.ndarray
    lags2: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    runs: int


def retained_energy(config):
    """Energy of each projected basis function kept inside the grid Nyquist band.

    Returns
    -------
    dict
        ``(j, m) -> (1/2pi) int_{|w| < M**j pi / dx} |psi_hat_m|^2`` (1 for
        band-limited families on a valid grid).
    """
    from . import quad

    out = {}
    for j in config.levels:
        cut = config.M ** j * np.pi / config.dx
        for m in range(config.M):
            spec = make_spectrum(config.family, m)
            edges = quad.panel_edges(0.0, cut, np.pi / 4, spec.breakpoints)
            val, _ = quad.integrate_panels(spec.eval_sq, edges, abstol=1e-10)
            out[(j, m)] = float(val) / np.pi
    return out


# ---------------------------------------------------------------- noise


def _circulant_eigs(model, n, dx):
    i = np.arange(n)
    row = model.autocov(np.minimum(i, n - i) * dx)
    lam = np.fft.fft(row).real
    if lam.min() < -1e-8 * lam.max():
        raise NonPositiveDefinite(
            f"circulant embedding has negative eigenvalue {lam.min():.3e}")
    return np.clip(lam, 0.0, None)


def synth_noise(model, n, dx, seed, dims=1):
    """Stationary Gaussian noise on a periodic grid of ``n`` (per side) samples.

    White noise of intensity ``sigma2`` has i.i.d. samples of variance
    ``sigma2 / dx**dims``. Colored models use exact circulant synthesis of the
    periodized covariance.

    Parameters
    ----------
    model : NoiseModel or SeparableNoise
    n : int
    dx : float
    seed : int or numpy.random.Generator
    dims : {1, 2}
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    shape = (n,) * dims
    if isinstance(model, SeparableNoise):
        if dims != 2:
            raise InvalidParam("separable models are 2D")
        f1, f2 = model.factors
        if f1.kind == "white" and f2.kind == "white":
            model = NoiseModel.white(f1.sigma2 * f2.sigma2)
        else:
            lam = np.multiply.outer(_circulant_eigs(f1, n, dx), _circulant_eigs(f2, n, dx))
            z = rng.standard_normal(shape)
            return np.fft.ifft2(np.sqrt(lam) * np.fft.fft2(z)).real
    if model.kind == "white":
        return rng.standard_normal(shape) * np.sqrt(model.sigma2 / dx ** dims)
    if dims == 2:
        raise InvalidParam("2D colored noise must be a SeparableNoise")
    lam = _circulant_eigs(model, n, dx)
    z = rng.standard_normal(n)
    return np.fft.ifft(np.sqrt(lam) * np.fft.fft(z)).real


# ---------------------------------------------------------------- wavelets


def _walsh(m, t):
    if m == 0:
        return ((t >= 0) & (t < 1)).astype(float)
    sign = -1.0 if m % 2 else 1.0
    return _walsh(m // 2, 2 * t) + sign * _walsh(m // 2, 2 * t - 1)


def sample_wavelet(spec, j, k, x):
    """Samples of ``M**(-j/2) psi(x / M**j - k)`` on a uniform grid ``x``.

    Primal Haar packets use their exact piecewise-constant form; everything
    else is an inverse discrete Fourier evaluation of the spectrum on at
    least ``2**16`` frequencies.

    Returns
    -------
    samples : ndarray
    energy : float
        Retained energy ``sum f**2 dx`` (1 for a fully captured function).
    """
    x = np.asarray(x, dtype=float)
    M = spec.family.M
    dx = x[1] - x[0]
    u = x / M ** j - k
    if spec.family.kind == "haar_packet" and spec.dual is None:
        f = M ** (-j / 2) * _walsh(spec.m, u)
    else:
        du = dx / M ** j
        nf = max(2 ** 16, 1 << int(np.ceil(np.log2(4 * x.size))))
        w = 2 * np.pi * np.fft.fftfreq(nf, du)
        vals = spec.eval_complex(w) * np.exp(1j * w * u[0])
        psi = np.fft.ifft(vals).real[: x.size] / du
        f = M ** (-j / 2) * psi
    energy = float(np.sum(f ** 2) * dx)
    if energy < 0.999:
        warnings.warn(f"sampled wavelet retains energy {energy:.5f} on the grid",
                      SupportTruncated, stacklevel=2)
    return f, energy


def _spectra(config, j):
    fam = config.family
    out = {}
    for m in range(config.M):
        prim = make_spectrum(fam, m)
        out[(m, "p")] = prim
        out[(m, "d")] = dual_spectrum(prim, HilbertDualRule(config.d))
    return out


def _filters(config, j, n):
    """Fourier multipliers ``conj(F)`` of every band and tree at level ``j``."""
    M = config.M
    w = 2 * np.pi * np.fft.fftfreq(n, config.dx)
    scale = M ** (j / 2)
    return {key: np.conj(scale * spec.eval_complex(M ** j * w))
            for key, spec in _spectra(config, j).items()}


def _keep_mask(config, j, filt, n):
    """Coefficients whose (1 - 1e-6)-energy support does not wrap around."""
    K = n // config.step(j)
    f = np.fft.ifft(filt).real  # f(-x) on the periodic grid
    e = np.fft.fftshift(f ** 2)
    c = np.cumsum(e) / e.sum()
    centre = n // 2
    lo = centre - np.searchsorted(c, 0.5e-6)
    hi = np.searchsorted(c, 1 - 0.5e-6) - centre
    step = config.step(j)
    k = np.arange(K) * step
    # support of f(x_i - k*step) is k*step + [-hi, lo] in samples
    return (k - hi >= 0) & (k + lo < n)


def level_coefficients(noise, config, j, filters=None):
    """Coefficients of one noise realization at level ``j``.

    Returns
    -------
    dict
        ``(m, "p")`` and ``(m, "d")`` keys for primal and dual trees.
    """
    n = noise.shape[0]
    if filters is None:
        filters = _filters(config, j, n)
    step = config.step(j)
    if noise.ndim == 1:
        nf = np.fft.fft(noise)
        return {key: np.fft.ifft(nf * h).real[::step] for key, h in filters.items()}
    # separable 2D: rows then columns, same tree on both axes
    nf = np.fft.fft(noise, axis=0)
    out = {}
    for m1 in range(config.M):
        for tree in ("p", "d"):
            rows = np.fft.ifft(nf * filters[(m1, tree)][:, None], axis=0).real[::step]
            rf = np.fft.fft(rows, axis=1)
            for m2 in range(config.M):
                out[((m1, m2), tree)] = np.fft.ifft(rf * filters[(m2, tree)][None, :],
                                                    axis=1).real[:, ::step]
    return out


def _cells_1d(config, kinds, pairs):
    cells = []
    for j in config.levels:
        for kind in kinds:
            for m in range(config.M):
                mps = range(config.M) if (pairs == "all" and kind != "primal_dual") else (m,)
                for mp in mps:
                    cells.append((j, m, mp, kind))
    return cells


def _trees(kind):
    return {"primal_dual": ("p", "d"), "primal_primal": ("p", "p"),
            "dual_dual": ("d", "d")}[kind]


def _linear_xcov(a, b, lags, K):
    out = np.empty(len(lags))
    for i, s in enumerate(lags):
        if s >= 0:
            out[i] = np.dot(a[s:], b[:b.size - s]) / K
        else:
            out[i] = np.dot(a[:a.size + s], b[-s:]) / K
    return out


def _run_many(fn, runs, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, range(runs)))
    return [fn(r) for r in range(runs)]


def mc_run_1d(config, model, lags, kinds=("primal_dual",), pairs="diagonal", workers=1):
    """Monte Carlo estimates of 1D coefficient covariances ``E{a[k+l] b[k]}``.

    Parameters
    ----------
    config : SimConfig
    model : NoiseModel
    lags : array_like of int
    kinds : sequence of {"primal_dual", "primal_primal", "dual_dual"}
    pairs : {"diagonal", "all"}
        Band pairs for primal/primal and dual/dual cells.
    workers : int
        Threads over runs; results do not depend on it.

    Returns
    -------
    list of MCEstimate
        Ordered by (j, kind, m, mprime, lag). Sample covariances are biased
        (divided by the coefficient count).
    """
    if config.dims != 1:
        raise InvalidParam("mc_run_1d needs a 1D config")
    for kind in kinds:
        if kind not in KINDS:
            raise InvalidParam(f"unknown covariance kind {kind!r}")
    lags = np.asarray(lags, dtype=np.int64)
    n = config.L_eff
    filters = {j: _filters(config, j, n) for j in config.levels}
    masks = {}
    if config.boundary == "discard":
        for j in config.levels:
            masks[j] = {key: _keep_mask(config, j, h, n) for key, h in filters[j].items()}
    cells = _cells_1d(config, kinds, pairs)

    def one_run(r):
        noise = synth_noise(model, n, config.dx, config.base_seed + r)
        out = np.empty((len(cells), lags.size))
        coefs = {j: level_coefficients(noise, config, j, filters[j]) for j in config.levels}
        for i, (j, m, mp, kind) in enumerate(cells):
            ta, tb = _trees(kind)
            a, b = coefs[j][(m, ta)], coefs[j][(mp, tb)]
            if config.boundary == "periodic":
                out[i] = kernels.circular_xcov(a, b, lags)
            else:
                keep = masks[j][(m, ta)] & masks[j][(mp, tb)]
                if keep.sum() < 2:
                    raise InvalidParam(
                        f"no coefficients survive boundary discarding at level {j}")
                a, b = a[keep], b[keep]
                out[i] = _linear_xcov(a, b, lags, a.size)
        return out

    res = np.stack(_run_many(one_run, config.runs, workers))
    mean = res.mean(axis=0)
    stderr = res.std(axis=0, ddof=1) / np.sqrt(config.runs)
    est = []
    for i, (j, m, mp, kind) in enumerate(cells):
        for q, lag in enumerate(lags):
            est.append(MCEstimate(j, m, mp, kind, int(lag), float(mean[i, q]),
                                  float(stderr[i, q]), config.runs))
    return est


def mc_run_2d(config, model, lags=range(4), post_transform=False, workers=1):
    """Monte Carlo 2D covariance fields at level ``config.J``.

    Estimates ``E{n_m[k + l] n_m^H[k]}`` for every subband ``m`` on the
    ``lags x lags`` grid. With ``post_transform``, detail subbands also get
    ``w = (n + n^H)/sqrt(2)``, ``w^H = (n - n^H)/sqrt(2)`` fields
    (``ww``, ``whwh`` and ``wwh``).

    Returns
    -------
    list of MCField2D
    """
    if config.dims != 2:
        raise InvalidParam("mc_run_2d needs a 2D config")
    lags = np.asarray(list(lags), dtype=np.int64)
    n = config.L_eff
    j = config.J
    filters = _filters(config, j, n)
    M = config.M
    subbands = [(m1, m2) for m1 in range(M) for m2 in range(M)]
    keys = [(mm, "nh") for mm in subbands]
    if post_transform:
        keys += [(mm, tag) for mm in subbands if 0 not in mm for tag in ("ww", "whwh", "wwh")]

    def one_run(r):
        noise = synth_noise(model, n, config.dx, config.base_seed + r, dims=2)
        coefs = level_coefficients(noise, config, j, filters)
        out = np.empty((len(keys), lags.size, lags.size))
        for i, (mm, tag) in enumerate(keys):
            p, d = coefs[(mm, "p")], coefs[(mm, "d")]
            if tag == "nh":
                a, b = p, d
            else:
                w, wh = (p + d) / np.sqrt(2), (p - d) / np.sqrt(2)
                a, b = {"ww": (w, w), "whwh": (wh, wh), "wwh": (w, wh)}[tag]
            out[i] = kernels.circular_xcov2d(a, b, lags, lags)
        return out

    res = np.stack(_run_many(one_run, config.runs, workers))
    mean = res.mean(axis=0)
    stderr = res.std(axis=0, ddof=1) / np.sqrt(config.runs)
    return [MCField2D(j, mm, tag, lags, lags, mean[i], stderr[i], config.runs)
            for i, (mm, tag) in enumerate(keys)]
