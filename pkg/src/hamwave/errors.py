"""Exception hierarchy shared across the package."""


class HamwaveError(Exception):
    """Base class for all package-specific failures."""


class ZeroModeRejected(HamwaveError):
    """A homogeneous operator or norm was applied to a field with nonzero mean."""


class NoConvergence(HamwaveError):
    """An iteration exhausted its budget or stagnated before reaching tolerance."""


class CollapseToZero(HamwaveError):
    """Fixed-point iterates vanished instead of converging to a profile."""


class UnderResolved(HamwaveError):
    """A rescaled or requested profile cannot be represented on the grid."""


class ZeroField(HamwaveError):
    """An operation that requires a nonzero field received zero."""


class SpectralConfigViolation(HamwaveError):
    """Eigenvalue counts differ from (one negative, one zero, positive rest)."""


class DegenerateConstraints(HamwaveError):
    """Constraint vectors for a constrained minimization are linearly dependent."""


class BlowupDetected(HamwaveError):
    """The max norm of an evolving field exceeded the configured ceiling."""


class ResolutionLoss(HamwaveError):
    """Spectral energy accumulated in the top third of the spectrum."""


class SingularEvaluation(HamwaveError):
    """A vortex field was evaluated inside the exclusion radius of a center."""


class ExpansionDiverging(HamwaveError):
    """Successive Dirichlet-Neumann expansion terms stopped decreasing."""


class NonZeroMean(HamwaveError):
    """A mean-zero argument was required but not supplied."""


class JacobianSingular(HamwaveError):
    """The Newton Jacobian is singular at the current iterate."""


class SymmetryDefect(HamwaveError):
    """An assembled operator matrix is further from symmetric than tolerated."""


class AdmissibilityLost(HamwaveError):
    """The vortex center approached the free surface beyond the safety margin."""
