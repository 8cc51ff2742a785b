"""Second-order statistics of stationary noise in M-band dual-tree wavelet decompositions.

Modules
-------
spectra
    Fourier-domain basis functions and their Hilbert duals.
xcorr
    Primal/dual cross-correlations: quadrature, closed forms, recursions.
covariance
    Coefficient covariances of white and colored stationary noise.
simulate
    Monte Carlo estimates of the same covariances.
report
    Tables, comparisons and file output for the command line.
"""

from .covariance import NoiseModel, SeparableNoise, cov_1d, cov_2d, post_transform_cov
from .errors import DTNoiseError, NumericalError, UsageError
from .kernels import BACKEND
from .simulate import SimConfig, mc_run_1d, mc_run_2d, synth_noise
from .spectra import HilbertDualRule, WaveletFamily, dual_spectrum, make_spectrum
from .xcorr import CorrelationSequence, gamma, gamma_provider

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CorrelationSequence",
    "DTNoiseError",
    "HilbertDualRule",
    "NoiseModel",
    "NumericalError",
    "SeparableNoise",
    "SimConfig",
    "UsageError",
    "WaveletFamily",
    "cov_1d",
    "cov_2d",
    "dual_spectrum",
    "gamma",
    "gamma_provider",
    "make_spectrum",
    "mc_run_1d",
    "mc_run_2d",
    "post_transform_cov",
    "synth_noise",
]
