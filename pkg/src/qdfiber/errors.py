"""Exception hierarchy shared by all qdfiber modules."""


class QdfiberError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QdfiberError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(DomainError):
    """An approximation is used outside its validity range."""


class NoSolutionError(QdfiberError, ValueError):
    """An inverse problem has no admissible solution."""


class InconsistencyError(QdfiberError, ValueError):
    """Inputs are individually valid but jointly unphysical."""


class ConfigError(QdfiberError, ValueError):
    """A simulation or scenario configuration is invalid."""


class EstimatorError(QdfiberError, ValueError):
    """A statistical estimator is undefined for the given data."""


class FitError(QdfiberError, RuntimeError):
    """A least-squares fit failed; ``last`` holds the final iterate if any."""

    def __init__(self, message, last=None, iterations=0):
        super().__init__(message)
        self.last = last
        self.iterations = iterations
