"""Exception types raised by lambertdde."""


class LambertDDEError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LambertDDEError, ValueError):
    """An argument lies outside the domain of the requested function."""


class SingularityError(LambertDDEError, ValueError):
    """Evaluation at a point where the quantity is singular."""


class ConvergenceError(LambertDDEError, RuntimeError):
    """An iteration failed to reach its tolerance within the iteration cap."""


class ModelError(LambertDDEError, ValueError):
    """Invalid delay system, preshape or input description."""


class DegenerateRootError(LambertDDEError, ArithmeticError):
    """A characteristic root is (numerically) repeated, so its residue is undefined."""


class BlowUpError(LambertDDEError, ArithmeticError):
    """The integrated state became non-finite."""

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time
