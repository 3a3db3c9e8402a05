"""A single tolerance record threaded through the library.

All identities implemented here are exact in exact arithmetic; tolerances exist
only to absorb floating point error on unit-scale data.  Tests may construct a
tighter or looser record and pass it explicitly.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances on unit-scale data.

    Attributes
    ----------
    eq : float
        Default equality tolerance for algebraic identities.
    herm : float
        Entrywise tolerance for hermiticity checks.
    wall : float
        Minimum distance of any W_I value from a stability wall.
    moment : float
        Residual tolerance for moment-map equations (unitarity checks).
    kernel : float
        Tolerance for membership in the kernel of the linearized complex
        moment map.
    invariant : float
        Tolerance when comparing gauge-invariant scalars of equivalent
        representations.
    det_floor : float
        Determinant magnitude below which a metric counts as singular.
    tikhonov : float
        Regularization floor for least-squares normal equations.
    """

    eq: float = 1e-12
    herm: float = 1e-14
    wall: float = 1e-9
    moment: float = 1e-10
    kernel: float = 1e-8
    invariant: float = 1e-8
    det_floor: float = 1e-300
    tikhonov: float = 1e-14


DEFAULT = Tolerances()
