"""Fourier-domain descriptions of M-band wavelet families and their Hilbert duals.

All spectra are vectorized over the angular frequency ``omega``. Values for
negative frequencies follow from conjugate symmetry (the basis functions are
real).

Supported families
------------------
shannon
    Ideal band-pass indicator bands ``[m*pi, (m+1)*pi)``.
meyer
    Band-limited with smooth polynomial tapers of half-width ``eps*pi``.
haar_packet
    Haar scaling function with Walsh-Hadamard wavelet packets, ``M = 2**P``.
franklin
    Dyadic orthonormal linear-spline (order 1) wavelets.
battle_lemarie
    Dyadic orthonormal spline wavelets of odd order ``p``.
custom_fir
    Any para-unitary M-band FIR bank, spectra from the truncated infinite
    product of the filter responses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidParam, NotParaUnitary, UnknownBand

__all__ = [
    "WaveletFamily",
    "WaveletSpectrum",
    "HilbertDualRule",
    "make_spectrum",
    "eval_spectrum",
    "eval_sq_modulus",
    "dual_spectrum",
    "spectrum_from_filters",
    "paraunitary_residual",
    "vanishing_moments",
    "meyer_window",
    "meyer_linear_phase",
    "meyer_window_sq",
    "bspline_autocorr_coeffs",
    "haar_packet_filters",
    "load_filter_file",
]

KINDS = ("shannon", "meyer", "haar_packet", "franklin", "battle_lemarie", "custom_fir")
TWO_PI = 2.0 * np.pi


def _sinc(x):
    # unnormalized sinc, sin(x)/x
    return np.sinc(np.asarray(x) / np.pi)


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class WaveletFamily:
    """Parameters of one wavelet family.

    Use the classmethod constructors; they validate the parameters.
    """

    kind: str
    M: int = 2
    epsilon: float | None = None
    window_nu: str = "poly7"
    spline_order: int | None = None
    filters: tuple | None = None
    packet_depth: int | None = None
    # Meyer only: odd linear phases eta_m(w) = slope_m * w + offset_m * sign(w)
    phase_slopes: tuple | None = None
    phase_offsets: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParam(f"unknown family kind {self.kind!r}")
        if int(self.M) != self.M or self.M < 2:
            raise InvalidParam("M must be an integer >= 2")
        if self.kind == "meyer":
            eps = self.epsilon
            if eps is None or not (0.0 < eps <= 1.0 / (self.M + 1) + 1e-15):
                raise InvalidParam(f"Meyer requires 0 < eps <= 1/(M+1), got {eps}")
            if self.window_nu != "poly7":
                raise InvalidParam(f"unknown Meyer window {self.window_nu!r}")
            if self.phase_slopes is not None and len(self.phase_slopes) != self.M:
                raise InvalidParam("phase_slopes needs one slope per band")
            if self.phase_offsets is not None:
                if self.phase_slopes is None or len(self.phase_offsets) != self.M:
                    raise InvalidParam("phase_offsets needs phase_slopes and one offset per band")
        if self.kind == "haar_packet":
            P = int(round(math.log2(self.M)))
            if 2 ** P != self.M:
                raise InvalidParam("Walsh-Hadamard packets need M a power of two")
            object.__setattr__(self, "packet_depth", P)
        if self.kind in ("franklin", "battle_lemarie") and self.M != 2:
            raise InvalidParam("spline wavelets are dyadic (M = 2)")
        if self.kind == "battle_lemarie":
            p = self.spline_order
            if p is None or p < 1 or p % 2 == 0:
                raise InvalidParam("Battle-Lemarie order must be a positive odd integer")
        if self.kind == "custom_fir":
            if self.filters is None or len(self.filters) != self.M:
                raise InvalidParam("custom_fir needs exactly M filters")
            filt = tuple(tuple(float(c) for c in h) for h in self.filters)
            object.__setattr__(self, "filters", filt)
            res = paraunitary_residual(filt)
            if res > 1e-8:
                raise NotParaUnitary(f"para-unitarity residual {res:.3e} > 1e-8")

    @classmethod
    def shannon(cls, M=2):
        return cls("shannon", M)

    @classmethod
    def meyer(cls, M=2, epsilon=None, phase_slopes=None, phase_offsets=None):
        """Meyer family; phases default to none (squared-modulus work only).

        See :func:`meyer_linear_phase` for phases compatible with
        orthonormality.
        """
        if epsilon is None:
            epsilon = 1.0 / (M + 1)
        if phase_slopes is not None:
            phase_slopes = tuple(float(s) for s in phase_slopes)
        if phase_offsets is not None:
            phase_offsets = tuple(float(c) for c in phase_offsets)
        return cls("meyer", M, epsilon=float(epsilon), phase_slopes=phase_slopes,
                   phase_offsets=phase_offsets)

    @classmethod
    def haar(cls, M=2):
        return cls("haar_packet", M)

    @classmethod
    def franklin(cls):
        return cls("franklin", 2, spline_order=1)

    @classmethod
    def battle_lemarie(cls, order=3):
        return cls("battle_lemarie", 2, spline_order=int(order))

    @classmethod
    def custom_fir(cls, filters):
        filters = tuple(tuple(h) for h in filters)
        return cls("custom_fir", len(filters), filters=filters)

    @property
    def band_limited(self):
        return self.kind in ("shannon", "meyer")

    @property
    def label(self):
        if self.kind == "meyer":
            return f"meyer(M={self.M},eps={self.epsilon:.6g})"
        if self.kind == "battle_lemarie":
            return f"battle_lemarie(p={self.spline_order})"
        return f"{self.kind}(M={self.M})"


@dataclass(frozen=True)
class HilbertDualRule:
    """Delay ``d`` of the dual scaling function."""

    d: int = 0


@dataclass(frozen=True)
class WaveletSpectrum:
    """Fourier transform of one primal basis function, or of its dual.

    Attributes
    ----------
    family : WaveletFamily
    m : int
        Band index.
    dual : HilbertDualRule or None
        ``None`` for the primal function.
    """

    family: WaveletFamily
    m: int
    dual: HilbertDualRule | None = None
    depth: int = field(default=24, compare=False)

    def __post_init__(self):
        if int(self.m) != self.m or not 0 <= self.m < self.family.M:
            raise UnknownBand(f"band {self.m} outside 0..{self.family.M - 1}")

    # evaluation
    def eval_complex(self, omega):
        omega = np.asarray(omega, dtype=float)
        val = _primal(self.family, self.m, omega, self.depth)
        if self.dual is not None:
            val = val * _dual_factor(self.m, self.dual.d, omega)
        return val

    __call__ = eval_complex

    def eval_sq(self, omega):
        # the dual factor has unit modulus
        return _primal_sq(self.family, self.m, np.asarray(omega, dtype=float), self.depth)

    # support and tail data used to set up quadrature
    @property
    def band_support(self):
        """``(lo, hi)`` on the positive axis outside which ``|psi_hat|`` vanishes."""
        fam, m = self.family, self.m
        if fam.kind == "shannon":
            return (m * np.pi, (m + 1) * np.pi)
        if fam.kind == "meyer":
            eps, M = fam.epsilon, fam.M
            if m == 0:
                return (0.0, np.pi * (1 + eps))
            hi = M * (1 + eps) * np.pi if m == M - 1 else (m + 1 + eps) * np.pi
            return ((m - eps) * np.pi, hi)
        return (0.0, np.inf)

    @property
    def breakpoints(self):
        """Frequencies where the spectrum is not smooth (positive axis)."""
        fam, m = self.family, self.m
        if fam.kind == "shannon":
            return (m * np.pi, (m + 1) * np.pi)
        if fam.kind == "meyer":
            eps, M = fam.epsilon, fam.M
            if m == 0:
                return ((1 - eps) * np.pi, (1 + eps) * np.pi)
            upper = (M * (1 - eps) * np.pi, M * (1 + eps) * np.pi) if m == M - 1 \
                else ((m + 1 - eps) * np.pi, (m + 1 + eps) * np.pi)
            return ((m - eps) * np.pi, (m + eps) * np.pi) + upper
        return ()

    @property
    def decay(self):
        """Power-law decay exponent of ``|psi_hat|**2`` (``None`` if band-limited)."""
        fam = self.family
        if fam.band_limited:
            return None
        if fam.kind == "haar_packet":
            return 2
        if fam.kind in ("franklin", "battle_lemarie"):
            return 2 * (fam.spline_order + 1)
        return 2

    @property
    def period(self):
        """Period of the oscillatory factor multiplying the power-law envelope."""
        fam = self.family
        if fam.kind == "haar_packet":
            return TWO_PI * 2 ** max(self.m.bit_length(), 0)
        if fam.kind in ("franklin", "battle_lemarie"):
            return 2 * TWO_PI if self.m else TWO_PI
        return TWO_PI * fam.M

    @property
    def vanishing_moments(self):
        return vanishing_moments(self.family, self.m)


def make_spectrum(family, m, depth=24):
    return WaveletSpectrum(family, int(m), None, depth)


def eval_spectrum(family, m, omega):
    """Complex value of the primal spectrum ``psi_hat_m(omega)``."""
    return make_spectrum(family, m).eval_complex(omega)


def eval_sq_modulus(family, m, omega):
    """``|psi_hat_m(omega)|**2`` using real formulas where available."""
    return make_spectrum(family, m).eval_sq(omega)


def dual_spectrum(spec, rule=None):
    """Spectrum of the Hilbert dual of ``spec``.

    Bands ``m != 0`` get the factor ``-1j * sign(omega)``. The scaling band
    gets ``(-1)**k * exp(-1j*(d + 1/2)*omega)`` on ``[2k*pi, 2(k+1)*pi)``,
    extended to negative frequencies by conjugate symmetry.
    """
    if rule is None:
        rule = HilbertDualRule()
    return replace(spec, dual=rule)


def _dual_factor(m, d, omega):
    if m != 0:
        return -1j * np.sign(omega)
    a = np.abs(omega)
    k = np.floor(a / TWO_PI)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return sign * np.exp(-1j * (d + 0.5) * omega)


# ---------------------------------------------------------------- Meyer


def _nu_poly7(theta):
    t = np.clip(theta, 0.0, 1.0)
    return t ** 4 * (35 - 84 * t + 70 * t ** 2 - 20 * t ** 3)


def meyer_linear_phase(M):
    """Phases ``(slopes, offsets)`` that make the M-band Meyer system orthonormal.

    Adjacent bands overlap near ``+-(m+1) pi`` and those two regions alias
    onto each other under integer shifts; a quarter-turn offset between
    neighbours makes the two contributions cancel. Slopes are zero.

    Examples
    --------
    >>> WaveletFamily.meyer(3, None, *meyer_linear_phase(3))  # doctest: +SKIP
    """
    return (0.0,) * M, tuple(m * np.pi / 2 for m in range(M))


def meyer_window(theta, kind="poly7"):
    """Taper ``W(theta) = cos(pi/2 * nu(theta))``, clipped to ``[0, 1]``."""
    return np.cos(0.5 * np.pi * _nu_poly7(theta))


def meyer_window_sq(theta, kind="poly7"):
    return meyer_window(theta, kind) ** 2


def _meyer_abs(fam, m, a):
    """Modulus of the Meyer spectrum at ``a = |omega|``."""
    eps, M = fam.epsilon, fam.M
    W = meyer_window
    pe = np.pi * eps
    out = np.zeros_like(a)
    if m == 0:
        out = np.where(a <= np.pi - pe, 1.0, out)
        tr = (a > np.pi - pe) & (a <= np.pi + pe)
        out = np.where(tr, W(a / (2 * pe) - (1 - eps) / (2 * eps)), out)
        return out
    lo_in = ((m - eps) * np.pi <= a) & (a <= (m + eps) * np.pi)
    out = np.where(lo_in, W((m + eps) / (2 * eps) - a / (2 * pe)), out)
    if m < M - 1:
        flat = ((m + eps) * np.pi < a) & (a < (m + 1 - eps) * np.pi)
        up = ((m + 1 - eps) * np.pi <= a) & (a <= (m + 1 + eps) * np.pi)
        upper = W(a / (2 * pe) - (m + 1 - eps) / (2 * eps))
    else:
        flat = ((m + eps) * np.pi < a) & (a <= M * (1 - eps) * np.pi)
        up = (M * (1 - eps) * np.pi < a) & (a <= M * (1 + eps) * np.pi)
        upper = W(a / (2 * pe * M) - (1 - eps) / (2 * eps))
    out = np.where(flat, 1.0, out)
    out = np.where(up, upper, out)
    return out


# ---------------------------------------------------------------- splines


@lru_cache(maxsize=None)
def bspline_autocorr_coeffs(p):
    """Exact integer samples of the centered B-spline of degree ``2p+1``.

    These are the cosine coefficients of the Euler-Frobenius lattice sum
    ``sum_k sinc**(2p+2)((omega + 2k*pi)/2) = sum_n b[n] cos(n*omega)``.

    Returns
    -------
    tuple of (n, float) pairs for ``n >= 0``.
    """
    deg = 2 * p + 1
    out = []
    for n in range(0, p + 1):
        # centered B-spline of degree deg at integer n
        x = Fraction(n) + Fraction(deg + 1, 2)
        s = Fraction(0)
        for j in range(deg + 2):
            t = x - j
            if t > 0:
                s += (-1) ** j * math.comb(deg + 1, j) * t ** deg
        v = s / math.factorial(deg)
        out.append((n, float(v)))
    return tuple(out)


def _euler_frobenius(p, omega):
    coeffs = bspline_autocorr_coeffs(p)
    val = np.full_like(omega, coeffs[0][1])
    for n, b in coeffs[1:]:
        val = val + 2.0 * b * np.cos(n * omega)
    return val


def _spline_sq(p, m, omega):
    if m == 0:
        return _sinc(omega / 2) ** (2 * p + 2) / _euler_frobenius(p, omega)
    q = omega / 4
    return (np.sin(q) ** (2 * p + 2) * _sinc(q) ** (2 * p + 2)
            * _euler_frobenius(p, omega / 2 + np.pi)
            / (_euler_frobenius(p, omega / 2) * _euler_frobenius(p, omega)))


def _franklin_sq(m, omega):
    if m == 0:
        return 3.0 / (1 + 2 * np.cos(omega / 2) ** 2) * _sinc(omega / 2) ** 4
    q = omega / 4
    ratio = 3 * (1 + 2 * np.sin(q) ** 2) / (
        (1 + 2 * np.cos(omega / 2) ** 2) * (1 + 2 * np.cos(q) ** 2))
    return ratio * np.sin(q) ** 4 * _sinc(q) ** 4


# ---------------------------------------------------------------- Haar packets


def _haar_packet(m, omega):
    """Walsh-Hadamard packet ``m``: Haar scaling spectrum times half-filters.

    Bit ``i`` of ``m`` (least significant first) selects the low- or
    high-pass Haar half-filter applied at ``omega / 2**(i+1)``.
    """
    P = m.bit_length()
    half = np.exp(-0.5j * omega / 2 ** P)
    val = _sinc(omega / 2 ** (P + 1)) * half
    for i in range(P):
        x = omega / 2 ** (i + 1)
        z = np.exp(-1j * x)
        val = val * (0.5 * (1 - z) if (m >> i) & 1 else 0.5 * (1 + z))
    return val


def _haar_packet_sq(m, omega):
    P = m.bit_length()
    val = _sinc(omega / 2 ** (P + 1)) ** 2
    for i in range(P):
        x = omega / 2 ** (i + 2)
        val = val * (np.sin(x) ** 2 if (m >> i) & 1 else np.cos(x) ** 2)
    return val


# ---------------------------------------------------------------- dispatch


def _primal(fam, m, omega, depth=24):
    kind = fam.kind
    a = np.abs(omega)
    if kind == "shannon":
        return ((m * np.pi <= a) & (a < (m + 1) * np.pi)).astype(complex)
    if kind == "meyer":
        mod = _meyer_abs(fam, m, a).astype(complex)
        if fam.phase_slopes is not None and m:
            eta = fam.phase_slopes[m] * omega
            if fam.phase_offsets is not None:
                eta = eta + fam.phase_offsets[m] * np.sign(omega)
            mod = mod * np.exp(1j * eta)
        return mod
    if kind == "haar_packet":
        return _haar_packet(m, omega)
    if kind in ("franklin", "battle_lemarie"):
        p = fam.spline_order
        sq = _franklin_sq(m, omega) if kind == "franklin" else _spline_sq(p, m, omega)
        mag = np.sqrt(sq)
        if m == 0:
            return mag.astype(complex)
        return -np.exp(-0.5j * omega) * mag
    return spectrum_from_filters(fam.filters, m, omega, depth)[0]


def _primal_sq(fam, m, omega, depth=24):
    kind = fam.kind
    if kind == "shannon":
        a = np.abs(omega)
        return ((m * np.pi <= a) & (a < (m + 1) * np.pi)).astype(float)
    if kind == "meyer":
        return _meyer_abs(fam, m, np.abs(omega)) ** 2
    if kind == "haar_packet":
        return _haar_packet_sq(m, omega)
    if kind == "franklin":
        return _franklin_sq(m, omega)
    if kind == "battle_lemarie":
        return _spline_sq(fam.spline_order, m, omega)
    return np.abs(spectrum_from_filters(fam.filters, m, omega, depth)[0]) ** 2


# ---------------------------------------------------------------- FIR banks


def _freq_response(h, x):
    # H(x) = sum_n h[n] exp(-1j n x), Horner in z = exp(-1j x)
    z = np.exp(-1j * x)
    val = np.zeros_like(z)
    for c in reversed(h):
        val = val * z + c
    return val


def spectrum_from_filters(filters, m, omega, depth=24):
    """Truncated infinite-product spectrum of an M-band FIR bank.

    ``psi_hat_m(omega) = M**-0.5 H_m(omega/M) * prod_{i=2..depth} M**-0.5 H_0(omega/M**i)``

    times the first-order (linear phase) approximation of the omitted factors.

    Parameters
    ----------
    filters : sequence of sequences
        ``filters[m]`` holds the real coefficients ``h_m[n]``, ``n >= 0``.
    m : int
        Band index.
    omega : array_like
    depth : int
        Number of product factors, at least 8.

    Returns
    -------
    value : ndarray of complex
    rel_bound : ndarray
        Bound on the relative truncation error of the omitted factors.
    """
    if depth < 8:
        raise InvalidParam("product depth must be >= 8")
    M = len(filters)
    if not 0 <= m < M:
        raise UnknownBand(f"band {m} outside 0..{M - 1}")
    omega = np.asarray(omega, dtype=float)
    scale = 1.0 / math.sqrt(M)
    val = _freq_response(filters[m], omega / M) * scale
    for i in range(2, depth + 1):
        val = val * (_freq_response(filters[0], omega / M ** i) * scale)
    # omitted factors H_0(x)/sqrt(M) = exp(-1j*mu*x) + O(x**2), mu the centre
    # of mass of h_0: apply their product exp(-1j*mu*omega/(M**depth (M-1)))
    h0 = np.asarray(filters[0], dtype=float)
    n = np.arange(h0.size)
    mu = scale * np.sum(n * h0)
    val = val * np.exp(-1j * mu * omega / (M ** depth * (M - 1)))
    # remaining second-order error of each factor: (sum n^2|h_0|/sqrt(M) + mu^2) x^2 / 2
    c2 = 0.5 * (scale * np.sum(n ** 2 * np.abs(h0)) + mu ** 2)
    x2 = (omega / M ** depth) ** 2 / (M ** 2 - 1)
    bound = np.expm1(c2 * x2)
    return val, bound


def paraunitary_residual(filters, npts=1024):
    """Max residual of the para-unitarity conditions on a frequency grid."""
    M = len(filters)
    omega = np.linspace(0, TWO_PI, npts, endpoint=False)
    shifts = omega[None, :] + TWO_PI * np.arange(M)[:, None] / M
    H = np.array([_freq_response(h, shifts) for h in filters])  # (m, p, w)
    gram = np.einsum("apw,bpw->abw", H, H.conj())
    target = M * np.eye(M)[:, :, None]
    return float(np.max(np.abs(gram - target)))


def haar_packet_filters(P):
    """M-band filters (``M = 2**P``) of the Walsh-Hadamard packet tree.

    ``H_m(omega) = prod_i A_{e_i}(2**(P-i) * omega)`` where ``e_1`` is the
    least significant bit of ``m``.
    """
    a = (np.array([1.0, 1.0]) / math.sqrt(2), np.array([1.0, -1.0]) / math.sqrt(2))
    M = 2 ** P
    out = []
    for m in range(M):
        h = np.array([1.0])
        for i in range(1, P + 1):
            bit = (m >> (i - 1)) & 1
            up = np.zeros(2 ** (P - i) + 1)
            up[0], up[-1] = a[bit][0], a[bit][1]
            h = np.convolve(h, up)
        out.append(tuple(h))
    return tuple(out)


def load_filter_file(path):
    """Read one filter per line (space-separated coefficients); ``#`` comments."""
    filters = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                filters.append(tuple(float(t) for t in line.split()))
            except ValueError as exc:
                raise InvalidParam(f"bad coefficient in filter file: {exc}") from None
    if len(filters) < 2:
        raise InvalidParam("filter file must contain at least two filters")
    return tuple(filters)


# ---------------------------------------------------------------- moments


def _discrete_moment_order(h, tol=1e-9):
    n = np.arange(len(h), dtype=float)
    h = np.asarray(h, dtype=float)
    norm = np.sqrt(np.sum(h ** 2))
    k = 0
    while k < len(h) and abs(np.sum(n ** k * h)) <= tol * norm * max(1.0, n[-1]) ** k:
        k += 1
    return k


def vanishing_moments(family, m):
    """Order of the zero of ``psi_hat_m`` at the origin.

    ``m = 0`` returns the minimum over the wavelet bands. Band-limited
    families vanish identically near 0; their value here is the effective
    order governing the decay of the integer-lag correlations instead
    (0 for Shannon, 4 for the degree-7 Meyer taper).
    """
    M = family.M
    if not 0 <= m < M:
        raise UnknownBand(f"band {m} outside 0..{M - 1}")
    if m == 0:
        return min(vanishing_moments(family, k) for k in range(1, M))
    kind = family.kind
    if kind == "shannon":
        return 0
    if kind == "meyer":
        return 4
    if kind == "haar_packet":
        return bin(m).count("1")
    if kind == "franklin":
        return 2
    if kind == "battle_lemarie":
        return family.spline_order + 1
    return _discrete_moment_order(family.filters[m])
