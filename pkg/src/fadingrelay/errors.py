"""Exception types raised across the package."""


class FadingRelayError(Exception):
    """Base class for all package errors."""


class DomainError(FadingRelayError, ValueError):
    """An argument lies outside the domain of a function."""


class SpecialFunctionOverflow(FadingRelayError, OverflowError):
    """A special-function value is not representable as a finite float."""


class InfeasibleTargetError(FadingRelayError, ValueError):
    """No spectral model with the requested parameters exists."""


class IllConditionedError(FadingRelayError, ArithmeticError):
    """A linear solve would lose too many significant digits."""

    def __init__(self, message, condition_estimate):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class PreconditionError(FadingRelayError, ValueError):
    """A scenario does not satisfy the hypothesis of a bound."""


class SearchError(FadingRelayError, RuntimeError):
    """The box search could not produce a result."""


class BudgetExceededError(SearchError):
    """The requested grid exceeds the evaluation budget."""


class EmbeddingError(FadingRelayError, ArithmeticError):
    """Circulant embedding produced a negative eigenvalue."""

    def __init__(self, message, min_eigenvalue):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class InsufficientDataError(FadingRelayError, ValueError):
    """A sample path is too short for the requested estimate."""


class QuadratureError(FadingRelayError, ArithmeticError):
    """Numerical integration did not reach the requested tolerance."""

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


class ConfigError(FadingRelayError, ValueError):
    """A scenario file or command-line request is malformed."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
