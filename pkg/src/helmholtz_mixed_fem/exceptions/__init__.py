"""
Custom exceptions package initialization.

Every error raised on purpose by the package derives from HelmholtzFemError so
callers (the CLI in particular) can separate expected failures from bugs.
"""


class HelmholtzFemError(Exception):
    """Base class for all package errors."""


class MeshError(HelmholtzFemError):
    """
    Invalid or inconsistent triangulation.

    Args:
        message: Human readable diagnostic
        invariant: Short name of the violated invariant (e.g. "conformity")
    """

    def __init__(self, message, invariant=None):
        super().__init__(message)
        self.invariant = invariant


class OverlayError(MeshError):
    """Overlay requested for meshes that do not share the same initial mesh."""


class MeshFormatError(MeshError):
    """Malformed plain-text mesh file."""


class SpaceError(HelmholtzFemError):
    """Finite element space misuse: unsupported degree or coefficient size mismatch."""


class QuadratureError(SpaceError):
    """Requested quadrature degree is not supported."""


class SolverError(HelmholtzFemError):
    """Linear solve failed (non-convergence or singular matrix)."""


class EstimatorError(HelmholtzFemError):
    """Estimator inputs do not belong together."""


class DataApproximationError(HelmholtzFemError):
    """Data marking could not reduce the oscillation within the allowed rounds."""


class VerificationError(HelmholtzFemError):
    """A structural check failed or its precondition does not hold."""


class ConfigurationError(HelmholtzFemError, ValueError):
    """Invalid run parameters, unknown experiment or unusable output path."""


__all__ = [
    "HelmholtzFemError",
    "MeshError",
    "OverlayError",
    "MeshFormatError",
    "SpaceError",
    "QuadratureError",
    "SolverError",
    "EstimatorError",
    "DataApproximationError",
    "VerificationError",
    "ConfigurationError",
]
