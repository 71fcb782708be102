"""Exception hierarchy for topsqueeze."""


class TopSqueezeError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(TopSqueezeError, ValueError):
    """Lattice parameters violate their invariants."""


class InvalidConfigError(TopSqueezeError, ValueError):
    """Disorder, ensemble or experiment configuration is invalid."""


class InvalidModeError(TopSqueezeError, ValueError):
    """Mode coefficients, indices or pairs are invalid."""


class ModeConflictError(TopSqueezeError, ValueError):
    """Squeezing injected into a mode that is not in vacuum."""


class ShapeError(TopSqueezeError, ValueError):
    """Array dimensions do not match."""


class DegenerateCovarianceError(TopSqueezeError, ValueError):
    """Covariance matrix is singular or not positive definite."""


class GridMismatchError(TopSqueezeError, ValueError):
    """Phase-space fields live on different grids."""


class InvalidResourceError(TopSqueezeError, ValueError):
    """Teleportation resource or kernel is unphysical."""


class OutcomeUnlikelyError(TopSqueezeError, ValueError):
    """Measurement outcome has negligible probability density."""


class EnsembleError(TopSqueezeError, RuntimeError):
    """A disorder realization failed inside an ensemble run."""

    def __init__(self, message, seed=None, group=None, index=None):
        super().__init__(message)
        self.seed = seed
        self.group = group
        self.index = index
