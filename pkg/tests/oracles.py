"""Independent reference computations.

Nothing here imports ``dtnoise``. Each function reaches the same quantity
as the library by a different route (time domain instead of frequency
domain, scipy's Fourier-weighted QUADPACK instead of panel quadrature, FFT
instead of closed forms), so agreement is meaningful.
"""

import math

import numpy as np
from scipy import integrate


def haar_psi1_hat(w):
    """Fourier transform of the Haar wavelet 1_[0,1/2) - 1_[1/2,1)."""
    w = np.asarray(w, dtype=float)
    z = np.exp(-0.5j * w)
    return (1 - z) ** 2 / (1j * w)


def haar_psi1_sq(w):
    return 16 * np.sin(np.asarray(w) / 4) ** 4 / np.asarray(w) ** 2


def _hilbert_indicator(x, a, b):
    # (1/pi) p.v. int_a^b dy / (x - y)
    return np.log(abs((x - a) / (x - b))) / math.pi


def haar_hilbert_psi1(x):
    """Time-domain Hilbert transform of the Haar wavelet."""
    return _hilbert_indicator(x, 0.0, 0.5) - _hilbert_indicator(x, 0.5, 1.0)


def haar_gamma1_time(tau):
    """``int psi_1(x) H[psi_1](x - tau) dx`` by QUADPACK on the two half cells."""
    sing = [tau, tau + 0.5, tau + 1.0]
    total = 0.0
    for a, b, s in ((0.0, 0.5, 1.0), (0.5, 1.0, -1.0)):
        pts = [p for p in sing if a < p < b]
        v, _ = integrate.quad(lambda x: haar_hilbert_psi1(x - tau), a, b, points=pts or None,
                              limit=200, epsabs=1e-13, epsrel=1e-13)
        total += s * v
    return total


def chi_gamma_qawf(tau):
    """``-(1/pi) int_0^inf chi_hat(w)**2 sin(w tau) dw`` with scipy's QAWF."""
    f = lambda w: (np.sin(w / 2) ** 2 / (w / 2)) ** 4 if w > 1e-8 else (w / 2) ** 4
    v, _ = integrate.quad(f, 0, np.inf, weight="sin", wvar=tau, limlst=200)
    return -v / math.pi


def franklin_a1_autocorr_fft(kmax, n=1 << 14):
    """Fourier coefficients of ``|A_1(w)|^2 = 6(2 - cos w)/((1 + 2cos^2 w)(2 + cos w))``."""
    w = 2 * np.pi * np.arange(n) / n
    c = np.cos(w)
    sq = 6 * (2 - c) / ((1 + 2 * c ** 2) * (2 + c))
    coeffs = np.fft.ifft(sq).real
    return coeffs[: kmax + 1]


def meyer_window_ref(theta):
    t = min(max(theta, 0.0), 1.0)
    nu = t ** 4 * (35 - 84 * t + 70 * t ** 2 - 20 * t ** 3)
    return math.cos(math.pi * nu / 2)


def meyer_I_ref(x, eps):
    """``2 eps int_0^1 W^2((1+t)/2) sin(pi eps x t) dt`` by adaptive QUADPACK."""
    f = lambda t: meyer_window_ref((1 + t) / 2) ** 2 * math.sin(math.pi * eps * x * t)
    v, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-15, epsrel=1e-14, limit=200)
    return 2 * eps * v


def shannon_gamma_ref(m, lag):
    """Shannon ``gamma_{psi_m, psi_m^H}`` from the band integral, done by hand."""
    # -(1/pi) int_{m pi}^{(m+1) pi} sin(w l) dw for m >= 1
    if lag == 0:
        return 0.0
    return (math.cos((m + 1) * math.pi * lag) - math.cos(m * math.pi * lag)) / (math.pi * lag)


def exp_circulant_lag1(dx):
    return math.exp(-dx)


def shannon_cov_ref(j, lag, noise_hat, M=2):
    """Shannon band-1 covariance for noise with Fourier transform ``noise_hat``.

    ``int Gamma_n(x) gamma(x/s - l) dx`` with ``gamma`` written as a sine
    integral over the band turns into
    ``(1/pi) int_pi^2pi sin(w l) noise_hat(w / s) dw`` for even ``Gamma_n``.
    """
    s = float(M) ** j
    f = lambda w: math.sin(w * lag) * noise_hat(w / s)
    v, _ = integrate.quad(f, math.pi, 2 * math.pi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return v / math.pi


def shannon_exp_cov_ref(j, lag, A=1.0, alpha=1.0, M=2):
    return shannon_cov_ref(j, lag, lambda u: 2 * A * alpha / (alpha ** 2 + u ** 2), M)


def shannon_gauss_cov_ref(j, lag, M=2):
    """Same for ``Gamma_n(x) = exp(-x^2/2)``."""
    return shannon_cov_ref(j, lag, lambda u: math.sqrt(2 * math.pi) * math.exp(-u * u / 2), M)
