"""Exception types shared across the solver."""


class AleBgkError(Exception):
    """Base class for solver-specific failures."""


class DegenerateStencilError(AleBgkError, RuntimeError):
    """Least-squares stencil is singular or too ill-conditioned to solve."""


class InsufficientNeighborsError(AleBgkError, RuntimeError):
    """A query point has fewer neighbors than the operation requires."""


class ConfigurationError(AleBgkError, ValueError):
    """Scenario or discretization parameters are inconsistent."""


class CflViolationError(AleBgkError, RuntimeError):
    """Time step violates the transport stability condition."""
