"""Exception hierarchy shared by all modules."""


class MagOrliczError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MagOrliczError, ValueError):
    """Malformed input: bad descriptor, out-of-range parameter, bad config."""


class DomainError(ValidationError):
    """An argument lies outside the domain of the operation."""


class ParseError(ValidationError):
    """Syntax error in an expression, carrying the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class PointEvaluationError(MagOrliczError, ArithmeticError):
    """An expression could not be evaluated at a given point."""

    def __init__(self, message, point=None):
        where = "" if point is None else f" at x={point}"
        super().__init__(f"{message}{where}")
        self.point = point


class RangeError(MagOrliczError):
    """A bracketing search failed to enclose a root within the allowed range."""


class ConvergenceError(MagOrliczError):
    """A quadrature did not meet its tolerance within the allowed budget.

    ``partial`` holds the best value obtained so far (may be ``None``).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class AdmissibilityError(MagOrliczError):
    """A Young function violates the growth condition 1 <= p- <= tG'/G <= p+."""
