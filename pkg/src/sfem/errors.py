"""Exception types shared across the package."""


class SfemError(Exception):
    """Base class for all errors raised by this package."""


class OutOfTubularNeighborhood(SfemError):
    """A point is too far from the surface for a unique closest point."""


class NoConvergence(SfemError):
    """An iterative process hit its iteration cap before converging."""

    def __init__(self, message, iterations, residual):
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")
        self.iterations = iterations
        self.residual = residual


class DegenerateTriangle(SfemError):
    """A triangle with (near) zero area was encountered."""

    def __init__(self, message, triangle_index=None):
        if triangle_index is not None:
            message = f"{message} (triangle {triangle_index})"
        super().__init__(message)
        self.triangle_index = triangle_index


class DomainError(SfemError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class InvalidMesh(SfemError):
    """A mesh violates a structural invariant (manifoldness, orientation, ...)."""


class MeshFileError(SfemError):
    """A mesh file could not be parsed."""
