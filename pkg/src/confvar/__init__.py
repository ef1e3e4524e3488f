"""Exact and numeric tools for conformal derivatives and Virasoro structures."""

from .algebra import Poly, TruncSeries
from .errors import (CompositionDomainError, ConfVarError, NoConvergenceError,
                     SingularLimitError, StepTooLargeError, TruncationError, UsageError)
from .virasoro import IdentityVector, basis, word_vector

__version__ = "0.1.0"

__all__ = [
    "CompositionDomainError", "ConfVarError", "IdentityVector", "NoConvergenceError", "Poly",
    "SingularLimitError", "StepTooLargeError", "TruncSeries", "TruncationError", "UsageError",
    "basis", "word_vector",
]
