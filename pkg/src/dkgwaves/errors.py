"""Exception hierarchy shared by the solvers."""


class DkgError(Exception):
    """Base class for all package errors."""


class DomainError(DkgError, ValueError):
    """Parameters outside the admissible range."""


class ResolutionError(DkgError, ValueError):
    """Grid too coarse for the requested transform."""


class SolverError(DkgError, RuntimeError):
    """A numerical solve failed to produce an accepted solution."""


class NoBracketError(SolverError):
    """Shooting classification never changed over the scanned range."""


class NonConvergenceError(SolverError):
    """Bisection or fixed-point loop ran out of steps."""


class DegenerateError(SolverError):
    """Reconstructed effective mass is not positive."""


class NoInteriorMinimumError(SolverError):
    """The sampled curve has its minimum at an endpoint."""
