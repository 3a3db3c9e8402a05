"""Star-quiver representations, moment maps, stability, and unitarization.

A representation is a pair (x, y) where x_i are complex 2-column vectors and
y_i are complex 2-row covectors, one per branch.  The gauge group acts by
(x_i, y_i) -> (A x_i t_i⁻¹, t_i y_i A⁻¹) with det A = 1 and t_i nonzero
scalars.  The complex moment map is (Σ (x_i y_i)^⊥, (y_i x_i)_i); the real
moment map is ((i/2) Σ (x_i x_i† − y_i† y_i)^⊥, ((|x_i|²−|y_i|²)/2)_i), with
the scalar slots reported as real numbers.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import least_squares

from . import mat2
from .errors import (
    NoConvergence,
    NotAHyperpolygon,
    NotStable,
    SingularGroupElt,
    WallWeights,
    ZeroVector,
)
from .tolerances import DEFAULT, Tolerances


@dataclass(frozen=True)
class QuiverRep:
    """A point of the doubled star-quiver representation space.

    Attributes
    ----------
    x : ndarray, shape (n, 2)
        Column vectors, one per branch.
    y : ndarray, shape (n, 2)
        Row covectors, one per branch; y[i] pairs with x[i] as y[i] @ x[i].
    """

    x: NDArray[np.complex128]
    y: NDArray[np.complex128]

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex)
        y = np.asarray(self.y, dtype=complex)
        if x.shape != y.shape or x.ndim != 2 or x.shape[1] != 2 or x.shape[0] < 1:
            raise ValueError(f"bad shapes x{x.shape} y{y.shape}")
        if not (np.all(np.isfinite(x.view(float))) and np.all(np.isfinite(y.view(float)))):
            raise ValueError("non-finite entries")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class BetaWeights:
    """Positive branch weights, checked for wall genericity on construction."""

    beta: NDArray[np.float64]
    tol: Tolerances = field(default=DEFAULT, compare=False)

    def __post_init__(self):
        b = np.asarray(self.beta, dtype=float)
        object.__setattr__(self, "beta", b)
        if np.any(b <= 0):
            raise ValueError("weights must be positive")
        n = len(b)
        for r in range(n + 1):
            for I in itertools.combinations(range(n), r):
                if abs(W(I, b)) < self.tol.wall:
                    raise WallWeights(f"|W_{set(I)}| below wall tolerance")

    @property
    def n(self) -> int:
        return len(self.beta)


@dataclass(frozen=True)
class GroupElt:
    """A gauge group element (A, t) with det A = 1 and t_i nonzero scalars."""

    A: NDArray[np.complex128]
    t: NDArray[np.complex128]

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        t = np.asarray(self.t, dtype=complex)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "t", t)
        if abs(np.linalg.det(A) - 1.0) > 1e-10:
            raise SingularGroupElt("det A must equal 1")
        if np.any(t == 0):
            raise SingularGroupElt("scaling factors must be nonzero")


@dataclass(frozen=True)
class PolygonView:
    """R³ images of the branch data under the Pauli identification.

    v[i] and w[i] have Euclidean lengths |x_i|²/√2 and |y_i|²/√2; for a
    unitary hyperpolygon the differences v_i − w_i close up into a polygon.
    """

    v: NDArray[np.float64]
    w: NDArray[np.float64]


def beta_array(beta) -> NDArray[np.float64]:
    """Coerce either a BetaWeights or a plain sequence to a float array."""
    if isinstance(beta, BetaWeights):
        return beta.beta
    return np.asarray(beta, dtype=float)


def W(I, beta) -> float:
    """Signed weight sum Σ_{i∈I} β_i − Σ_{i∉I} β_i."""
    beta = beta_array(beta)
    s = np.full(len(beta), -1.0)
    s[list(I)] = 1.0
    return float(np.dot(s, beta))


def mu_complex(rep: QuiverRep):
    """Complex moment map (Σ (x_i y_i)^⊥, (y_i x_i)_i)."""
    total = np.zeros((2, 2), dtype=complex)
    scalars = np.empty(rep.n, dtype=complex)
    for i in range(rep.n):
        prod = np.outer(rep.x[i], rep.y[i])
        total += prod
        scalars[i] = rep.y[i] @ rep.x[i]
    return mat2.traceless(total), scalars


def mu_real(rep: QuiverRep):
    """Real moment map ((i/2) Σ (x x† − y† y)^⊥, ((|x|²−|y|²)/2)_i)."""
    total = np.zeros((2, 2), dtype=complex)
    scalars = np.empty(rep.n, dtype=float)
    for i in range(rep.n):
        total += np.outer(rep.x[i], np.conj(rep.x[i]))
        total -= np.outer(np.conj(rep.y[i]), rep.y[i])
        scalars[i] = (
            float(np.sum(np.abs(rep.x[i]) ** 2) - np.sum(np.abs(rep.y[i]) ** 2)) / 2.0
        )
    return 0.5j * mat2.traceless(total), scalars


def moment_residual(rep: QuiverRep, beta) -> float:
    """Distance of the real moment map from the level (0, β)."""
    m, c = mu_real(rep)
    return float(np.sqrt(mat2.frob(m) ** 2 + np.sum((c - beta_array(beta)) ** 2)))


def is_unitary(rep: QuiverRep, beta, tol: Tolerances = DEFAULT) -> bool:
    """Whether the representation solves the real moment-map equation."""
    return moment_residual(rep, beta) <= tol.moment


def _check_hyperpolygon(rep: QuiverRep, tol: Tolerances):
    m, c = mu_complex(rep)
    res = np.sqrt(mat2.frob(m) ** 2 + float(np.sum(np.abs(c) ** 2)))
    scale = max(1.0, float(np.max(np.abs(rep.x))) ** 2)
    if res > 100 * tol.kernel * scale:
        raise NotAHyperpolygon(f"complex moment map residual {res:.3e}")


def proportional(u, v, tol_rel: float) -> bool:
    """Relative cross-product test for proportionality of two 2-vectors."""
    cross = abs(u[0] * v[1] - u[1] * v[0])
    return cross <= tol_rel * float(np.linalg.norm(u) * np.linalg.norm(v))


def straight_subsets(rep: QuiverRep, tol: float = 1e-10):
    """Maximal subsets whose x-vectors are pairwise proportional.

    Returns the list of maximal straight subsets (as sorted tuples).  Every
    straight subset is contained in one of these.
    """
    norms = np.linalg.norm(rep.x, axis=1)
    if np.any(norms == 0):
        raise ZeroVector("straightness undefined when some x_i = 0")
    classes: list[list[int]] = []
    for i in range(rep.n):
        for cls in classes:
            if all(proportional(rep.x[i], rep.x[j], tol) for j in cls):
                cls.append(i)
                break
        else:
            classes.append([i])
    return [tuple(sorted(c)) for c in classes]


def is_stable(rep: QuiverRep, beta: BetaWeights, tol: Tolerances = DEFAULT) -> bool:
    """Stability for the given weights.

    The representation must be a hyperpolygon (vanishing complex moment map).
    It is unstable iff some x_i = 0, or some straight subset I with y_i = 0
    for all i outside I has W_I(β) > 0.  Among straight subsets containing the
    support of y inside a maximal straight class M, the class M itself
    maximizes W, so only maximal classes containing supp(y) need checking.
    """
    _check_hyperpolygon(rep, tol)
    if np.any(np.linalg.norm(rep.x, axis=1) == 0):
        return False
    ynorm = np.linalg.norm(rep.y, axis=1)
    yscale = max(float(np.max(ynorm)), 1.0)
    support = {i for i in range(rep.n) if ynorm[i] > 1e-12 * yscale}
    for M in straight_subsets(rep):
        if support <= set(M):
            w = W(M, beta.beta)
            if abs(w) < tol.wall:
                raise WallWeights(f"W_{set(M)} on a wall")
            if w > 0:
                return False
    return True


def act(g: GroupElt, rep: QuiverRep) -> QuiverRep:
    """Apply the gauge action (x, y) -> (A x t⁻¹, t y A⁻¹)."""
    Ainv = np.linalg.inv(g.A)
    x = (rep.x @ g.A.T) / g.t[:, None]
    y = (rep.y @ Ainv) * g.t[:, None]
    return QuiverRep(x, y)


def exp_elt(H, s) -> GroupElt:
    """Group element (exp H, exp s) from a traceless hermitian H and real s."""
    return GroupElt(mat2.expm_herm(np.asarray(H, dtype=complex)), np.exp(np.asarray(s, dtype=float)).astype(complex))


def _params_to_elt(params, n) -> GroupElt:
    H = sum(p * s for p, s in zip(params[:3], mat2.SIGMA))
    return exp_elt(H, params[3:])


def unitarize(
    rep: QuiverRep,
    beta: BetaWeights,
    tol: Tolerances = DEFAULT,
    max_iter: int = 10_000,
) -> QuiverRep:
    """Gauge translate solving the real moment-map equation.

    Searches over hermitian exponentials exp(H)·exp(s) of the compact
    directions, solving ‖μ_ℝ − (0, β)‖ = 0 by least squares and composing
    exponentials until the residual is below ``tol.moment``.  Stability
    guarantees existence and uniqueness up to the compact group.
    """
    if not is_stable(rep, beta, tol):
        raise NotStable("cannot unitarize an unstable representation")
    n = rep.n
    current = rep

    def residual(params, base):
        moved = act(_params_to_elt(params, n), base)
        m, c = mu_real(moved)
        return np.concatenate([mat2.herm_to_r3(-1j * m), c - beta.beta])

    evals = 0
    for _ in range(60):
        if moment_residual(current, beta.beta) <= tol.moment:
            return current
        sol = least_squares(
            residual,
            np.zeros(3 + n),
            args=(current,),
            method="lm",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=max_iter,
        )
        evals += sol.nfev
        current = act(_params_to_elt(sol.x, n), current)
        if evals > 50 * max_iter:
            break
    if moment_residual(current, beta.beta) <= tol.moment:
        return current
    raise NoConvergence(
        f"residual {moment_residual(current, beta.beta):.3e} after {evals} evaluations"
    )


def polygon_view(rep: QuiverRep, tol: Tolerances = DEFAULT) -> PolygonView:
    """R³ polygon data (v_i, w_i) of a hyperpolygon."""
    _check_hyperpolygon(rep, tol)
    v = np.array(
        [
            mat2.herm_to_r3(mat2.traceless(np.outer(rep.x[i], np.conj(rep.x[i]))))
            for i in range(rep.n)
        ]
    )
    w = np.array(
        [
            mat2.herm_to_r3(mat2.traceless(np.outer(np.conj(rep.y[i]), rep.y[i])))
            for i in range(rep.n)
        ]
    )
    return PolygonView(v, w)


def gauge_invariants(rep: QuiverRep) -> NDArray[np.float64]:
    """Gauge-invariant scalars used to compare equivalent representations.

    Returns |x_i|², |y_i|², and tr(x_i y_i x_j y_j) for i ≤ j, flattened
    (real and imaginary parts).
    """
    out = [np.sum(np.abs(rep.x) ** 2, axis=1), np.sum(np.abs(rep.y) ** 2, axis=1)]
    prods = [np.outer(rep.x[i], rep.y[i]) for i in range(rep.n)]
    cross = []
    for i in range(rep.n):
        for j in range(i, rep.n):
            t = np.trace(prods[i] @ prods[j])
            cross.extend([t.real, t.imag])
    return np.concatenate([out[0], out[1], np.array(cross)])


# ---------------------------------------------------------------------------
# Random instances and serialization
# ---------------------------------------------------------------------------


def random_hyperpolygon(
    n: int, rng: np.random.Generator, y_scale: float = 0.7
) -> QuiverRep:
    """Random solution of the complex moment-map equation.

    Branch by branch, y_i is chosen in the annihilator of x_i (so y_i x_i = 0);
    the last three branches are then adjusted to cancel Σ x_i y_i, which lives
    in the three-dimensional space of traceless matrices.
    """
    if n < 3:
        raise ValueError("need at least three branches")
    for _ in range(200):
        x = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
        y = np.zeros((n, 2), dtype=complex)
        coef = y_scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        for i in range(n):
            # annihilator covector of the column (a, b) is (b, -a) up to scale
            y[i] = coef[i] * np.array([x[i, 1], -x[i, 0]])
        # Each x_i y_i is rank-1 traceless (y_i x_i = 0); three generic ones
        # span the traceless matrices, so solve for the last three
        # coefficients by least squares and verify the residual.
        rows = []
        rhs = np.zeros(4, dtype=complex)
        for i in range(n):
            prod = np.outer(x[i], np.array([x[i, 1], -x[i, 0]]))
            if i < n - 3:
                rhs -= coef[i] * prod.reshape(-1)
            else:
                rows.append(prod.reshape(-1))
        A = np.stack(rows, axis=1)
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        coef[n - 3 :] = sol
        for i in (n - 3, n - 2, n - 1):
            y[i] = coef[i] * np.array([x[i, 1], -x[i, 0]])
        rep = QuiverRep(x, y)
        m, c = mu_complex(rep)
        if mat2.frob(m) + float(np.sum(np.abs(c))) < 1e-10:
            return rep
    raise NoConvergence("failed to draw a random hyperpolygon")


def random_stable_hyperpolygon(
    n: int, beta: BetaWeights, rng: np.random.Generator, y_scale: float = 0.7
) -> QuiverRep:
    """Random stable hyperpolygon for the given weights."""
    for _ in range(500):
        rep = random_hyperpolygon(n, rng, y_scale)
        try:
            if is_stable(rep, beta):
                return rep
        except WallWeights:
            continue
    raise NoConvergence("failed to draw a stable hyperpolygon")


def to_json_dict(rep: QuiverRep, beta=None) -> dict:
    """JSON-ready dict {"n", "beta", "x", "y"} with [re, im] entry pairs."""
    def c2(z):
        return [float(np.real(z)), float(np.imag(z))]

    d = {
        "n": rep.n,
        "x": [[c2(rep.x[i, 0]), c2(rep.x[i, 1])] for i in range(rep.n)],
        "y": [[c2(rep.y[i, 0]), c2(rep.y[i, 1])] for i in range(rep.n)],
    }
    if beta is not None:
        d["beta"] = [float(b) for b in beta_array(beta)]
    return d


def from_json_dict(d: dict):
    """Parse the JSON record; returns (rep, beta-or-None)."""
    n = int(d["n"])

    def parse(entries):
        return np.array(
            [[complex(e[0], e[1]) for e in row] for row in entries], dtype=complex
        )

    rep = QuiverRep(parse(d["x"]), parse(d["y"]))
    if rep.n != n:
        raise ValueError("declared n does not match data")
    beta = np.asarray(d["beta"], dtype=float) if "beta" in d else None
    return rep, beta


def save_json(path, rep: QuiverRep, beta=None):
    with open(path, "w") as f:
        json.dump(to_json_dict(rep, beta), f, indent=1)
        f.write("\n")


def load_json(path):
    with open(path) as f:
        return from_json_dict(json.load(f))
