"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for bad input,
3 for numerical failures.
"""

from __future__ import annotations


class DTNoiseError(Exception):
    exit_code = 3


class UsageError(DTNoiseError, ValueError):
    exit_code = 2


class InvalidParam(UsageError):
    pass


class UnknownBand(UsageError):
    pass


class InvalidBand(UsageError):
    pass


class InvalidSubband(UsageError):
    pass


class UnknownTable(UsageError):
    pass


class MissingLag(UsageError):
    pass


class NotSeparable(UsageError):
    pass


class NotParaUnitary(UsageError):
    pass


class PhaseUnavailable(UsageError):
    pass


class NumericalError(DTNoiseError, ArithmeticError):
    exit_code = 3


class QuadratureNonConvergent(NumericalError):
    pass


class GammaDomainExceeded(NumericalError):
    pass


class DegenerateFit(NumericalError):
    pass


class NotIntegrable(NumericalError):
    pass


class NonPositiveDefinite(NumericalError):
    pass


class SupportTruncated(UserWarning):
    """Sampled wavelet lost energy to a finite grid."""
