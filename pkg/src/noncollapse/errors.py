"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the open positive cone (some entry <= 0)."""


class NotPositiveDefinite(ValueError):
    """Symmetric-matrix argument has an eigenvalue <= 0."""


class DegenerateSpectrum(ValueError):
    """Eigenvalue gap too small for a divided difference that has no limit."""


class SingularShift(ValueError):
    """Shift k too close to the smallest eigenvalue; A - kI or B - kI nearly singular."""


class ConvexityLost(RuntimeError):
    """A principal radius of curvature dropped to zero or below."""


class PairTooClose(ValueError):
    """Chord shorter than the separation tolerance; use the diagonal extension."""


class DiagonalWitness(ValueError):
    """The extremum witness is the diagonal; no off-diagonal tangent condition to check."""


class CenterOutside(ValueError):
    """Proposed center is not interior to the body."""


class RunTooShort(ValueError):
    """Flow run has too few samples for the requested diagnostic."""
