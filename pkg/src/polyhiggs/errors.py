"""Exception types shared across the library."""


class PolyhiggsError(Exception):
    """Base class for all library errors."""


class SingularMetric(PolyhiggsError):
    """A hermitian metric is numerically singular."""


class ZeroVector(PolyhiggsError):
    """A vector required to be nonzero vanished."""


class NotAHyperpolygon(PolyhiggsError):
    """The complex moment map does not vanish within tolerance."""


class WallWeights(PolyhiggsError):
    """Weights sit on (or too close to) a stability wall."""


class SingularGroupElt(PolyhiggsError):
    """A group element has a zero scaling factor or is not invertible."""


class NoConvergence(PolyhiggsError):
    """An iterative solve failed to reach its tolerance."""


class NotStable(PolyhiggsError):
    """The representation is not stable for the given weights."""


class NotUnitary(PolyhiggsError):
    """The representation does not solve the real moment-map equation."""


class NotInKernel(PolyhiggsError):
    """A tangent vector does not lie in the kernel of the linearized complex moment map."""


class ROutOfRange(PolyhiggsError):
    """The scale parameter R is outside (0, R_max)."""


class NotNilpotent(PolyhiggsError):
    """A residue fails to be nilpotent within tolerance."""


class FlagMismatch(PolyhiggsError):
    """Flag data is inconsistent with the residues."""


class AtPuncture(PolyhiggsError):
    """Evaluation requested at a puncture."""


class UnsupportedN(PolyhiggsError):
    """The operation is only available for a specific number of branches."""


class NotFixedPoint(PolyhiggsError):
    """The representation is not a circle-action fixed point."""


class OutOfDomain(PolyhiggsError):
    """Evaluation point is outside the domain of definition."""


class AtCenter(PolyhiggsError):
    """Evaluation requested at a monopole center."""


class QuadratureNoConvergence(PolyhiggsError):
    """Grid refinement failed to stabilize an integral."""


class OutsideBiswas(PolyhiggsError):
    """Parabolic weights are outside the admissible polytope."""


class NotPositive(PolyhiggsError):
    """A metric that must be positive-definite is not."""
