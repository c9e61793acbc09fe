"""Exception hierarchy shared by every module."""


class ReflectodeError(Exception):
    """Base class for all library errors."""


class InvalidInputError(ReflectodeError, ValueError):
    """Non-finite or otherwise malformed input."""


class DomainError(ReflectodeError, ValueError):
    """A threshold function was called outside its coefficient regime."""


class QuadratureError(ReflectodeError, ArithmeticError):
    """Adaptive integration did not reach the requested tolerance.

    The best available estimate and its error bound are kept on the
    exception so callers can decide whether to accept them.
    """

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NonuniqueProblemError(ReflectodeError):
    """The initial point lies in the degenerate set where u~(t0) = 0."""

    def __init__(self, message, degenerate=None):
        super().__init__(message)
        self.degenerate = degenerate


class HypothesisViolatedError(ReflectodeError):
    """A hypothesis of the n-th order construction failed its numerical check."""

    def __init__(self, message, check):
        super().__init__(message)
        self.check = check
