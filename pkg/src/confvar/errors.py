"""Exception types shared by all modules."""


class ConfVarError(Exception):
    """Base class for library errors."""


class UsageError(ConfVarError, ValueError):
    """Invalid arguments or inconsistent inputs."""


class CompositionDomainError(ConfVarError, ValueError):
    """Series composition with an inner series that has a constant term."""


class TruncationError(ConfVarError, ValueError):
    """A computation needs more terms than the inputs carry."""


class SingularLimitError(ConfVarError, ArithmeticError):
    """A coincident-point limit left a surviving pole."""


class StepTooLargeError(ConfVarError, ArithmeticError):
    """A path-map step made the denominator vanish numerically."""


class NoConvergenceError(ConfVarError, ArithmeticError):
    """Richardson extrapolation did not settle within tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
