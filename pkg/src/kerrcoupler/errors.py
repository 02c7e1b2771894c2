"""Exception hierarchy.

Numeric failures derive from :class:`NumericError`; bad user input derives
from :class:`ConfigError`. The CLI maps the two families onto distinct exit
codes.
"""


class CouplerError(Exception):
    """Base class for all package errors."""


class ConfigError(CouplerError, ValueError):
    """Invalid scenario configuration or parameter set."""

    def __init__(self, message, *, field=None, line=None):
        self.field = field
        self.line = line
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field is not None:
            prefix.append(f"field '{field}'")
        if prefix:
            message = f"{', '.join(prefix)}: {message}"
        super().__init__(message)


class DimensionError(CouplerError, ValueError):
    """Operands live in incompatible spaces, or the truncation is too small."""


class DegenerateParams(CouplerError, ValueError):
    pass


class NumericError(CouplerError, ArithmeticError):
    """A computation produced a result outside its numerical contract."""


class NearZeroSupport(NumericError):
    """State has negligible weight in the {0,2} x {0,2} Fock subspace."""


class NotHermitian(NumericError):
    pass


class NotPSD(NumericError):
    pass


class InvalidDensityMatrix(NumericError):
    pass


class StepSizeTooLarge(NumericError):
    """Adaptive integrator could not meet its error tolerance."""


class EigendecompositionFailed(NumericError):
    pass
