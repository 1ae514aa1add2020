"""Exception types raised across the package."""


class StokesSwimError(Exception):
    """Base class for all package errors."""


class GeometryError(StokesSwimError, ValueError):
    """Invalid or degenerate input geometry."""


class MeshResourceError(StokesSwimError, RuntimeError):
    """Mesh generation would exceed the configured vertex budget."""


class DomainError(StokesSwimError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class UnsupportedOrderError(StokesSwimError, ValueError):
    """Requested polynomial or quadrature order is not available."""


class ConfigurationError(StokesSwimError, ValueError):
    """A problem or run configuration is inconsistent."""


class ConsistencyError(StokesSwimError, ValueError):
    """Objects that must share a mesh or DOF map do not."""


class SingularMatrixError(StokesSwimError, ArithmeticError):
    """A (numerically) singular pivot was met during factorization."""

    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class SimulationError(StokesSwimError, RuntimeError):
    """A time step of the swimmer simulation failed."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step
