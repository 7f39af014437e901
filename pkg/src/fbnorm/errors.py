"""Exception types raised across the package.

Each class carries the process exit code the CLI maps it to.
"""


class FBError(Exception):
    exit_code = 1


class ParameterDomainError(FBError, ValueError):
    """Parameters outside the domain of the distribution (e.g. non-SPD covariance)."""

    exit_code = 1


class ConfigurationError(FBError, ValueError):
    """Quadrature settings that violate one of the window/grid inequalities."""

    exit_code = 1


class DataValidationError(FBError, ValueError):
    exit_code = 2

    def __init__(self, message, rows=None):
        super().__init__(message)
        self.rows = list(rows) if rows is not None else []


class NumericalDomainError(FBError, ArithmeticError):
    """A non-finite value appeared at a quadrature node."""

    exit_code = 3

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class AccuracyError(FBError, ArithmeticError):
    """The quadrature result failed the imaginary-residual gate."""

    exit_code = 3

    def __init__(self, message, imag_residual=None):
        super().__init__(message)
        self.imag_residual = imag_residual


class ConditioningError(FBError, ArithmeticError):
    exit_code = 3


class LowAcceptanceError(FBError, RuntimeError):
    exit_code = 3

    def __init__(self, message, rate=None, accepted=0):
        super().__init__(message)
        self.rate = rate
        self.accepted = accepted


class StagnationError(FBError, RuntimeError):
    """Line search could not decrease the objective; carries the last iterate."""

    exit_code = 4

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
