"""Parabolic Higgs data on the punctured sphere and the quiver correspondence.

A representation maps to Higgs data by φ_i = x_i y_i (nilpotent residues),
flag lines F_i = ⟨x_i⟩, and weights α_i = 1/2 − R β_i; the Higgs field is
φ(z) = Σ φ_i / (z − p_i) dz with Σ φ_i = 0.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import mat2
from .hyperpolygon import BetaWeights, QuiverRep, W, beta_array, is_stable, unitarize
from .hp_tangent import TangentHP
from .errors import (
    AtPuncture,
    FlagMismatch,
    NotFixedPoint,
    NotNilpotent,
    NotStable,
    OutsideBiswas,
    ROutOfRange,
    UnsupportedN,
    WallWeights,
    ZeroVector,
)
from .tolerances import DEFAULT, Tolerances

TWO_PI = 2.0 * np.pi


def default_punctures(n: int) -> NDArray[np.complex128]:
    """The nth roots of unity."""
    return np.exp(2j * np.pi * np.arange(n) / n).astype(complex)


def r_max(beta) -> float:
    """Largest admissible scale parameter, 1/Σβ_i."""
    return 1.0 / float(np.sum(beta_array(beta)))


@dataclass(frozen=True)
class AlphaWeights:
    """Parabolic weights α_i = 1/2 − R β_i for an admissible R."""

    alpha: NDArray[np.float64]
    R: float
    beta: NDArray[np.float64]

    @property
    def n(self) -> int:
        return len(self.alpha)


def alpha_of(beta: BetaWeights, R: float) -> AlphaWeights:
    """Weights α(R); requires 0 < R < 1/Σβ so that all α_i ∈ (0, 1/2)."""
    b = beta.beta
    if not (0.0 < R < r_max(b)):
        raise ROutOfRange(f"R={R} outside (0, {r_max(b)})")
    return AlphaWeights(0.5 - R * b, float(R), b)


def normalize_flag(f) -> NDArray[np.complex128]:
    """Unit flag vector with the first nonzero coordinate real positive."""
    f = np.asarray(f, dtype=complex)
    norm = float(np.linalg.norm(f))
    if norm == 0:
        raise ZeroVector("flag vector is zero")
    f = f / norm
    lead = f[0] if abs(f[0]) > 1e-14 else f[1]
    return f * (np.conj(lead) / abs(lead))


@dataclass(frozen=True)
class ParabolicHiggs:
    """Punctures, nilpotent residues, flag lines, weights, scale.

    Invariants checked on construction: Σ φ_i = 0, each residue traceless
    with zero determinant, φ_i F_i = 0 and im φ_i ⊆ ⟨F_i⟩, distinct punctures.
    """

    p: NDArray[np.complex128]
    phi: NDArray[np.complex128]
    F: NDArray[np.complex128]
    alpha: AlphaWeights
    tol: Tolerances = field(default=DEFAULT, compare=False)

    def __post_init__(self):
        p = np.asarray(self.p, dtype=complex)
        phi = np.asarray(self.phi, dtype=complex)
        F = np.asarray(self.F, dtype=complex)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "F", F)
        n = len(p)
        if phi.shape != (n, 2, 2) or F.shape != (n, 2):
            raise ValueError("inconsistent shapes")
        scale = max(1.0, float(np.max(np.abs(phi))))
        if mat2.frob(phi.sum(axis=0)) > 1e-10 * scale:
            raise NotNilpotent("residues do not sum to zero")
        for i in range(n):
            if abs(np.trace(phi[i])) > 1e-10 * scale or abs(
                np.linalg.det(phi[i])
            ) > 1e-10 * scale**2:
                raise NotNilpotent(f"residue {i} is not nilpotent")
            fi = F[i]
            if abs(np.linalg.norm(fi) - 1.0) > 1e-8:
                raise FlagMismatch(f"flag {i} is not unit length")
            if np.linalg.norm(phi[i] @ fi) > 1e-8 * scale:
                raise FlagMismatch(f"residue {i} does not kill its flag")
            img = phi[i] @ np.array([np.conj(fi[1]), -np.conj(fi[0])])
            if abs(img[0] * fi[1] - img[1] * fi[0]) > 1e-8 * scale:
                raise FlagMismatch(f"residue {i} image is not the flag line")
        dists = np.abs(p[:, None] - p[None, :])
        if np.min(dists + np.eye(n)) <= 0:
            raise ValueError("punctures must be distinct")

    @property
    def n(self) -> int:
        return len(self.p)


def to_higgs(
    rep: QuiverRep, p, beta: BetaWeights, R: float, tol: Tolerances = DEFAULT
) -> ParabolicHiggs:
    """Higgs data of a stable hyperpolygon: φ_i = x_i y_i, F_i = ⟨x_i⟩."""
    if not is_stable(rep, beta, tol):
        raise NotStable("only stable hyperpolygons map to Higgs data")
    alpha = alpha_of(beta, R)
    phi = np.array([np.outer(rep.x[i], rep.y[i]) for i in range(rep.n)])
    F = np.array([normalize_flag(rep.x[i]) for i in range(rep.n)])
    return ParabolicHiggs(np.asarray(p, dtype=complex), phi, F, alpha, tol)


def from_higgs(h: ParabolicHiggs) -> QuiverRep:
    """Rank-one factorization φ_i = x_i y_i with x_i spanning the flag line."""
    n = h.n
    x = np.empty((n, 2), dtype=complex)
    y = np.empty((n, 2), dtype=complex)
    for i in range(n):
        x[i] = h.F[i]
        if mat2.frob(h.phi[i]) < 1e-14:
            y[i] = 0.0
            continue
        # y solves x y = φ; contract with x† to extract the row.
        y[i] = np.conj(x[i]) @ h.phi[i]
        resid = mat2.frob(np.outer(x[i], y[i]) - h.phi[i])
        if resid > 1e-8 * mat2.frob(h.phi[i]):
            raise FlagMismatch(f"residue {i} is not x y for the stored flag")
    return QuiverRep(x, y)


def eval_phi(h: ParabolicHiggs, z: complex) -> NDArray[np.complex128]:
    """Coefficient of dz of the Higgs field at z."""
    z = complex(z)
    d = z - h.p
    if np.min(np.abs(d)) == 0:
        raise AtPuncture(f"z={z} is a puncture")
    return np.tensordot(1.0 / d, h.phi, axes=(0, 0))


def phi_dot_residues(rep: QuiverRep, v: TangentHP) -> NDArray[np.complex128]:
    """Residues ẋ_i y_i + x_i ẏ_i of the Higgs-field deformation."""
    return np.array(
        [
            np.outer(v.xdot[i], rep.y[i]) + np.outer(rep.x[i], v.ydot[i])
            for i in range(rep.n)
        ]
    )


def phi_dot(rep: QuiverRep, v: TangentHP, z: complex, p) -> NDArray[np.complex128]:
    """Deformation Σ (ẋ_i y_i + x_i ẏ_i)/(z − p_i) of the Higgs field.

    The residues sum to zero when v solves the linearized complex moment-map
    equation, keeping the deformation regular at infinity.
    """
    z = complex(z)
    p = np.asarray(p, dtype=complex)
    d = z - p
    if np.min(np.abs(d)) == 0:
        raise AtPuncture(f"z={z} is a puncture")
    res = phi_dot_residues(rep, v)
    return np.tensordot(1.0 / d, res, axes=(0, 0))


def parabolic_stability(h: ParabolicHiggs, tol: Tolerances = DEFAULT) -> bool:
    """Slope stability against φ-invariant line subbundles.

    Degree-0 line subbundles of the trivial rank-2 bundle are constant lines;
    a constant line is invariant iff it equals the image line of every nonzero
    residue.  Its parabolic slope is Σ_i w_i with w_i = 1−α_i when the line is
    the flag at p_i and α_i otherwise, compared against the total slope n/2.
    Subbundles of degree ≤ −1 never destabilize for admissible weights
    (Σ(1/2 − α_i) < 1).
    """
    n = h.n
    nz = [i for i in range(n) if mat2.frob(h.phi[i]) > 1e-12]
    candidates: list[NDArray[np.complex128]] = []
    if nz:
        # the common image line of all nonzero residues, if it exists
        lines = [normalize_flag(h.F[i]) for i in nz]
        ref = lines[0]
        if all(abs(l[0] * ref[1] - l[1] * ref[0]) < 1e-8 for l in lines):
            candidates.append(ref)
    else:
        # every constant line is invariant; the flag directions maximize slope
        seen: list[NDArray[np.complex128]] = []
        for i in range(n):
            f = normalize_flag(h.F[i])
            if not any(abs(f[0] * s[1] - f[1] * s[0]) < 1e-10 for s in seen):
                seen.append(f)
        candidates.extend(seen)
    total_slope = n / 2.0
    for line in candidates:
        slope = 0.0
        for i in range(n):
            f = h.F[i]
            is_flag = abs(line[0] * f[1] - line[1] * f[0]) < 1e-8
            slope += (1.0 - h.alpha.alpha[i]) if is_flag else h.alpha.alpha[i]
        if abs(slope - total_slope) < tol.wall:
            raise WallWeights("a subbundle slope sits on the stability wall")
        if slope > total_slope:
            return False
    return True


def det_phi(h: ParabolicHiggs, tol: Tolerances = DEFAULT):
    """Coefficients of q(z) = det(φ(z)) Π (z − p_i).

    The residues are nilpotent, so det φ has at most simple poles and q is
    a polynomial of degree ≤ n − 4 (the quadratic-differential coefficients
    of det φ).  For n = 4 the constant value is returned and verified at
    three sample points; for n > 4 the coefficient array (highest degree
    first) is returned.
    """
    n = h.n

    def q(z):
        return np.linalg.det(eval_phi(h, z)) * np.prod(z - h.p)

    spread = float(np.max(np.abs(h.p))) + 1.0
    if n == 4:
        samples = [q(spread * np.exp(2j * np.pi * k / 3 + 0.17j)) for k in range(3)]
        if np.max(np.abs(np.diff(samples))) > 1e-10 * max(
            1.0, float(np.max(np.abs(samples)))
        ):
            raise ValueError("determinant section is not constant")
        return complex(np.mean(samples))
    deg = max(n - 4, 0)
    zs = spread * np.exp(2j * np.pi * (np.arange(2 * deg + 2) + 0.31) / (2 * deg + 2))
    V = np.vander(zs, deg + 1)
    vals = np.array([q(z) for z in zs])
    coeffs, *_ = np.linalg.lstsq(V, vals, rcond=None)
    return coeffs


class NilpotentComponent(enum.Enum):
    """Connected components of the det φ = 0 fiber by residue support."""

    CENTRAL_SPHERE = "central-sphere"
    EXTERIOR_PAIR = "exterior-pair"
    DISTINGUISHED_EXTERIOR = "distinguished-exterior"


def nilpotent_component(h: ParabolicHiggs, tol: Tolerances = DEFAULT):
    """Classify a det φ = 0 point by its nonzero residues.

    Returns (component, I) where I is the support of the residues.  Requires
    the weights inside the admissible polytope (n = 4).
    """
    ok, _ = biswas_membership(h.alpha)
    if not ok:
        raise OutsideBiswas("weights outside the admissible polytope")
    d = det_phi(h)
    scale = max(1.0, float(np.max(np.abs(h.phi))) ** 2)
    if abs(d) > 1e-8 * scale:
        raise NotNilpotent("det φ does not vanish")
    nz = tuple(i for i in range(h.n) if mat2.frob(h.phi[i]) > 1e-10)
    if not nz:
        return NilpotentComponent.CENTRAL_SPHERE, nz
    ref = h.phi[nz[0]]

    # proportionality of residues, tested entrywise via cross products
    def prop(a, b):
        a = a.reshape(-1)
        b = b.reshape(-1)
        cross = np.outer(a, b) - np.outer(b, a)
        return np.abs(cross).max() <= 1e-8 * np.linalg.norm(a) * np.linalg.norm(b)

    all_prop = all(prop(h.phi[i], ref) for i in nz[1:])
    if all_prop and len(nz) == 2:
        return NilpotentComponent.EXTERIOR_PAIR, nz
    if not all_prop and len(nz) == h.n:
        return NilpotentComponent.DISTINGUISHED_EXTERIOR, nz
    raise NotFixedPoint(f"unrecognized residue pattern with support {nz}")


def biswas_membership(alpha: AlphaWeights, tol: Tolerances = DEFAULT):
    """Membership in the admissible weight polytope for n = 4.

    The polytope is 0 < W_I(α) < 1 over the |I| = 3 subsets.  Returns the
    flag together with a chamber signature: signs of the three independent
    |I| = 2 walls W_{{0,i}}(α) and of W_{[4]}(α) − 1.
    """
    if alpha.n != 4:
        raise UnsupportedN("polytope membership implemented for n = 4")
    a = alpha.alpha
    inside = True
    for I in itertools.combinations(range(4), 3):
        w = W(I, a)
        if abs(w) < tol.wall or abs(w - 1.0) < tol.wall:
            raise WallWeights(f"W_{set(I)}(α) on a polytope wall")
        if not (0.0 < w < 1.0):
            inside = False
    signature = []
    for i in (1, 2, 3):
        w = W((0, i), a)
        if abs(w) < tol.wall:
            raise WallWeights(f"W_{{0,{i}}}(α) on a chamber wall")
        signature.append(1 if w > 0 else -1)
    w4 = W((0, 1, 2, 3), a) - 1.0
    if abs(w4) < tol.wall:
        raise WallWeights("W_[4](α) − 1 on a chamber wall")
    signature.append(1 if w4 > 0 else -1)
    return inside, tuple(signature)


def short_subsets(beta, size: int = 2):
    """Subsets I of the given size with W_I(β) < 0, sorted."""
    b = beta_array(beta)
    return [
        I
        for I in itertools.combinations(range(len(b)), size)
        if W(I, b) < 0
    ]


def fixed_point_support(rep: QuiverRep, tol: Tolerances = DEFAULT):
    """Support I of y for a circle-action fixed point, or () when y = 0.

    Requires the fixed-point shape: either y = 0, or y supported on a
    straight subset I whose complement is also straight.
    """
    from .hyperpolygon import straight_subsets

    ynorm = np.linalg.norm(rep.y, axis=1)
    scale = max(float(np.max(np.abs(rep.x))), 1.0)
    support = tuple(i for i in range(rep.n) if ynorm[i] > 1e-9 * scale)
    if not support:
        return ()
    comp = tuple(i for i in range(rep.n) if i not in support)
    classes = straight_subsets(rep, tol=1e-8)
    def straight(J):
        return any(set(J) <= set(M) for M in classes)
    if not straight(support) or (comp and not straight(comp)):
        raise NotFixedPoint("y-support and complement must both be straight")
    return support


def morse_hp(rep: QuiverRep, beta: BetaWeights, tol: Tolerances = DEFAULT) -> float:
    """Circle moment-map value at a fixed point, as the coefficient of i.

    Zero on the y = 0 locus; −W_I(β)/2 on the component supported on the
    short subset I (equal to ½ Σ|y_i|² after unitarization).
    """
    I = fixed_point_support(rep, tol)
    if not I:
        return 0.0
    return -W(I, beta.beta) / 2.0


def morse_hitchin_fixed(I, degL1: int, alpha: AlphaWeights) -> float:
    """Fixed-point value of the Hitchin-side moment map, coefficient of i.

    M = −π R⁻¹ (deg L₁ + Σ_{i∈I}(1/2 − α_i) + Σ_{i∉I}(α_i − 1/2)); for
    α = α(R) and deg L₁ = 0 this equals −π W_I(β), independent of R.
    """
    a = alpha.alpha
    inside = sum(0.5 - a[i] for i in I)
    outside = sum(a[i] - 0.5 for i in range(alpha.n) if i not in I)
    return -np.pi / alpha.R * (degL1 + inside + outside)


def torelli_table(beta: BetaWeights, R: float):
    """Period table over the exterior spheres (n = 4).

    One row per short |I| = 2 subset with columns: the subset, the first
    complex-structure period on each side, their ratio, and the (vanishing)
    second and third periods.  The first period is 2π times the moment-map
    difference between the sphere's two fixed points (the interior end has
    value 0); the Hitchin-side column is −π W_I(β) − 0 scaled by 2π/(2π)
    bookkeeping, i.e. exactly 2π times the quotient-side column.
    """
    if beta.n != 4:
        raise UnsupportedN("period table implemented for n = 4")
    alpha = alpha_of(beta, R)
    rows = []
    for I in short_subsets(beta.beta):
        m_top = -W(I, beta.beta) / 2.0
        tau_hp = TWO_PI * (m_top - 0.0)
        m_hitchin_top = morse_hitchin_fixed(I, 0, alpha)
        tau_hitchin = TWO_PI * (m_hitchin_top - 0.0)
        rows.append(
            {
                "I": I,
                "tau_hp_j1": tau_hp,
                "tau_hitchin_j1": tau_hitchin,
                "ratio": tau_hitchin / tau_hp,
                "tau_j2": 0.0,
                "tau_j3": 0.0,
            }
        )
    return rows


def fixed_point_rep(
    I, beta: BetaWeights, rng=None, unitary: bool = True
) -> QuiverRep:
    """A representative of the fixed-point component supported on short I.

    Branches in I share the flag direction e₁ with nonzero y's along the
    annihilator summing to zero; complementary branches share the direction
    e₂ with y = 0, so I and its complement are both straight.
    """
    n = beta.n
    I = tuple(I)
    if W(I, beta.beta) >= 0:
        raise NotFixedPoint("support must be a short subset")
    x = np.zeros((n, 2), dtype=complex)
    y = np.zeros((n, 2), dtype=complex)
    comp = [i for i in range(n) if i not in I]
    # nonzero y-coefficients along the annihilator of e1, summing to zero
    coefs = 2.0 ** np.arange(len(I))
    coefs -= np.mean(coefs)
    for k, i in enumerate(I):
        x[i] = (1.0, 0.0)
        y[i] = (0.0, coefs[k])
    for j in comp:
        x[j] = (0.0, 1.0)
    rep = QuiverRep(x, y)
    if unitary:
        rep = unitarize(rep, beta)
    return rep
