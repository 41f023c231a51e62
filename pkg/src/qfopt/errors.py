"""Exception hierarchy shared by every module."""


class QfoptError(Exception):
    """Base class for all library errors."""


class ValidationError(QfoptError, ValueError):
    """Inputs or configuration violate a documented precondition."""


class SingularDesignError(ValidationError):
    """The regression design matrix is not of full column rank."""


class ConvergenceError(QfoptError, ArithmeticError):
    """A numerical routine stopped without meeting its tolerance.

    ``best`` carries the last iterate when one is available.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class BootstrapFailure(QfoptError, ArithmeticError):
    """Too many bootstrap draws or Monte Carlo replications failed."""


class LoadError(ValidationError):
    """A panel file could not be parsed into a valid sample."""
