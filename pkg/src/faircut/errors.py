"""Exception types shared across the package."""


class FaircutError(Exception):
    """Base class for all package errors."""


class ParameterError(FaircutError, ValueError):
    """Invalid input parameters or inconsistent arguments."""


class BudgetError(FaircutError, ValueError):
    """Instance exceeds an enumeration or statevector budget."""


class GenerationError(FaircutError, RuntimeError):
    """Random instance generation exhausted its retry budget."""

    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts


class ConvergenceError(FaircutError, RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""

    def __init__(self, message, gap=None, iterations=None):
        super().__init__(message)
        self.gap = gap
        self.iterations = iterations


class VerificationError(FaircutError, RuntimeError):
    """A certificate check (duality, closed-form equality) failed."""
