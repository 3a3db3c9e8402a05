"""Tangent vectors to the quotient: unitary lifts, metric, symplectic pairing.

A tangent vector is a pair (ẋ, ẏ) of deformations of a representation.  A
*unitary lift* at a unitary representation satisfies both the linearized
complex moment-map equations

    Σ (ẋ_i y_i + x_i ẏ_i) = 0,      ẏ_i x_i + y_i ẋ_i = 0,

and orthogonality to the gauge orbit,

    Σ (ẋ_i x_i† − y_i† ẏ_i)^⊥ = 0,  x_i† ẋ_i − ẏ_i y_i† = 0.

Unitary lifts compute the quotient metric via the flat norm Σ |ẋ|² + |ẏ|².
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import mat2
from .hyperpolygon import QuiverRep, is_unitary, mu_complex
from .errors import NotInKernel, NotUnitary, ZeroVector
from .tolerances import DEFAULT, Tolerances


@dataclass(frozen=True)
class TangentHP:
    """A deformation (ẋ, ẏ) of a representation, stored like the base point."""

    xdot: NDArray[np.complex128]
    ydot: NDArray[np.complex128]

    def __post_init__(self):
        xd = np.asarray(self.xdot, dtype=complex)
        yd = np.asarray(self.ydot, dtype=complex)
        if xd.shape != yd.shape or xd.ndim != 2 or xd.shape[1] != 2:
            raise ValueError("bad tangent shapes")
        object.__setattr__(self, "xdot", xd)
        object.__setattr__(self, "ydot", yd)

    @property
    def n(self) -> int:
        return self.xdot.shape[0]

    def __add__(self, other: "TangentHP") -> "TangentHP":
        return TangentHP(self.xdot + other.xdot, self.ydot + other.ydot)

    def __sub__(self, other: "TangentHP") -> "TangentHP":
        return TangentHP(self.xdot - other.xdot, self.ydot - other.ydot)

    def __rmul__(self, c) -> "TangentHP":
        return TangentHP(c * self.xdot, c * self.ydot)


def infinitesimal_action(xi, rep: QuiverRep) -> TangentHP:
    """Tangent generated by a Lie algebra element (A, λ), tr A = 0.

    The branch-i components are (A x_i − x_i λ_i, λ_i y_i − y_i A).
    """
    A, lam = xi
    A = np.asarray(A, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    if abs(np.trace(A)) > 1e-12 * max(1.0, mat2.frob(A)):
        raise ValueError("generator must be traceless")
    xdot = rep.x @ A.T - lam[:, None] * rep.x
    ydot = lam[:, None] * rep.y - rep.y @ A
    return TangentHP(xdot, ydot)


def d_mu_complex(rep: QuiverRep, v: TangentHP):
    """Linearized complex moment map (Σ(ẋy + xẏ)^⊥, (ẏx + yẋ)_i)."""
    total = np.zeros((2, 2), dtype=complex)
    scalars = np.empty(rep.n, dtype=complex)
    for i in range(rep.n):
        total += np.outer(v.xdot[i], rep.y[i]) + np.outer(rep.x[i], v.ydot[i])
        scalars[i] = v.ydot[i] @ rep.x[i] + rep.y[i] @ v.xdot[i]
    return mat2.traceless(total), scalars


def check_unitary_lift(rep: QuiverRep, v: TangentHP, tol: float = 1e-10) -> bool:
    """All four unitary-lift conditions, each to the given tolerance."""
    m, c = d_mu_complex(rep, v)
    if mat2.frob(m) > tol or np.max(np.abs(c)) > tol:
        return False
    total = np.zeros((2, 2), dtype=complex)
    for i in range(rep.n):
        total += np.outer(v.xdot[i], np.conj(rep.x[i]))
        total -= np.outer(np.conj(rep.y[i]), v.ydot[i])
        s = np.conj(rep.x[i]) @ v.xdot[i] - v.ydot[i] @ np.conj(rep.y[i])
        if abs(s) > tol:
            return False
    return mat2.frob(mat2.traceless(total)) <= tol


def _orbit_basis(rep: QuiverRep):
    """Real basis of the complex gauge orbit directions as flat vectors."""
    n = rep.n
    gens = []
    for s in mat2.SIGMA:
        for c in (1.0, 1.0j):
            gens.append((c * s, np.zeros(n, dtype=complex)))
    for i in range(n):
        for c in (1.0, 1.0j):
            lam = np.zeros(n, dtype=complex)
            lam[i] = c
            gens.append((np.zeros((2, 2), dtype=complex), lam))
    cols = []
    for g in gens:
        t = infinitesimal_action(g, rep)
        cols.append(_flatten(t))
    return np.stack(cols, axis=1)


def _flatten(v: TangentHP) -> NDArray[np.float64]:
    z = np.concatenate([v.xdot.reshape(-1), v.ydot.reshape(-1)])
    return np.concatenate([z.real, z.imag])


def _unflatten(w, n: int) -> TangentHP:
    half = len(w) // 2
    z = w[:half] + 1j * w[half:]
    return TangentHP(z[: 2 * n].reshape(n, 2), z[2 * n :].reshape(n, 2))


def project_unitary(
    rep: QuiverRep,
    v: TangentHP,
    beta=None,
    tol: Tolerances = DEFAULT,
) -> TangentHP:
    """Orthogonal projection of a kernel vector to the unitary lifts.

    Removes the component of v along the complex gauge orbit (real span of
    the 6 + 2n generator directions) with respect to the flat real metric.
    The input must lie in the kernel of the linearized complex moment map;
    the output then satisfies all four unitary-lift conditions.
    """
    if beta is not None and not is_unitary(rep, beta, tol):
        raise NotUnitary("projection requires a unitary base point")
    m, c = d_mu_complex(rep, v)
    scale = max(1.0, float(np.linalg.norm(_flatten(v))))
    if mat2.frob(m) + float(np.max(np.abs(c), initial=0.0)) > tol.kernel * scale:
        raise NotInKernel("tangent is not in the kernel of the linearized moment map")
    B = _orbit_basis(rep)
    w = _flatten(v)
    gram = B.T @ B + tol.tikhonov * np.eye(B.shape[1])
    coeffs = np.linalg.solve(gram, B.T @ w)
    return _unflatten(w - B @ coeffs, rep.n)


def random_unitary_lift(
    rep: QuiverRep, rng: np.random.Generator, beta=None, tol: Tolerances = DEFAULT
) -> TangentHP:
    """Random unitary lift: a random kernel vector, projected.

    The kernel vector is produced by least squares from a random ambient
    deformation, removing its linearized complex moment-map component.
    """
    n = rep.n
    raw = TangentHP(
        rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2)),
        rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2)),
    )
    # Assemble the real matrix of the linearized complex moment map and
    # remove the row-space component of raw, leaving its kernel component.
    dim = 8 * n
    cols = []
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = 1.0
        t = _unflatten(e, n)
        m, c = d_mu_complex(rep, t)
        vec = np.concatenate([m.reshape(-1), c])
        cols.append(np.concatenate([vec.real, vec.imag]))
    C = np.stack(cols, axis=1)
    w = _flatten(raw)
    row_component, *_ = np.linalg.lstsq(C, C @ w, rcond=None)
    return project_unitary(rep, _unflatten(w - row_component, n), beta, tol)


def hp_norm_sq(v: TangentHP) -> float:
    """Squared norm Σ |ẋ_i|² + |ẏ_i|² of a unitary lift."""
    return float(np.sum(np.abs(v.xdot) ** 2) + np.sum(np.abs(v.ydot) ** 2))


def hp_symplectic(v1: TangentHP, v2: TangentHP) -> complex:
    """Holomorphic symplectic pairing Σ (ẏ_{1,i}·ẋ_{2,i} − ẏ_{2,i}·ẋ_{1,i}).

    Covector-on-vector contraction per branch; antisymmetric and complex
    bilinear.  The overall sign convention is the one under which the
    quadrature pullback of the Hitchin-side pairing equals +2π times this.
    """
    return complex(
        np.sum(v1.ydot * v2.xdot) - np.sum(v2.ydot * v1.xdot)
    )


def nu_flags(rep: QuiverRep, v: TangentHP, i: int) -> NDArray[np.complex128]:
    """Flag-correcting infinitesimal gauge element at branch i.

    Traceless, and satisfies −ν̇ x_i = ẋ_i, so the corrected deformation
    fixes the flag line through x_i.
    """
    x = rep.x[i]
    xd = v.xdot[i]
    nx2 = float(np.sum(np.abs(x) ** 2))
    if nx2 == 0:
        raise ZeroVector("flag correction requires x_i != 0")
    P = mat2.traceless(np.outer(x, np.conj(x)))
    term1 = -mat2.traceless(np.outer(xd, np.conj(x))) / nx2
    term2 = -(np.conj(x) @ xd) * P / nx2**2
    return term1 + term2
