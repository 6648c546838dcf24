"""Exception hierarchy shared by every isqlab module."""


class IsqlabError(Exception):
    """Base class for all errors raised by isqlab."""


class RangeError(IsqlabError, ValueError):
    """An argument lies outside the supported evaluation range."""


class ContractError(IsqlabError, ValueError):
    """Shapes, grids or sectors of the inputs do not fit together."""


class DomainError(IsqlabError, ValueError):
    """The requested operation is undefined for these parameters."""


class NumericalError(IsqlabError, ArithmeticError):
    """An iterative method failed to converge."""


class AccuracyError(IsqlabError, ArithmeticError):
    """A certified accuracy bound could not be met.

    The offending residual is kept on the ``residual`` attribute.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TruncationError(AccuracyError):
    """Data does not decay at the truncation radius."""


class HorizonError(IsqlabError, RuntimeError):
    """A requested time lies beyond the trusted propagation horizon."""

    def __init__(self, message, horizon=None):
        super().__init__(message)
        self.horizon = horizon


class ResolutionError(IsqlabError, ValueError):
    """The grid cannot resolve the requested angular momenta."""


class ConfigError(IsqlabError, ValueError):
    """Invalid experiment configuration."""
