"""The exact single-puncture solution and its first variation.

On the punctured unit disk, data (x, y, β, R) with y x = 0 and
|x|² − |y|² = 2β determines the radial solution

    λ(r) = 2β r^{2Rβ} / (|x|² − |y|² r^{4Rβ}),

and the metric h = √h_det · exp(N log λ) with N = 2(x x†)^⊥/|x|².  All
integral evaluators report i-valued quantities as the real coefficient of i
under the conventions dz̄∧dz = 2i dx∧dy and counterclockwise boundary
circles (so ∮ dz̄/z̄ = −2πi).

Radial integrands are rational in u = r^{4Rβ}; substituting u makes them
smooth on [0, δ^{4Rβ}] and captures the mass accumulating at exponentially
small radii when R is small.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from . import mat2
from .errors import OutOfDomain, ZeroVector
from .tolerances import DEFAULT, Tolerances

TWO_PI = 2.0 * np.pi


def aligned_frame(x) -> NDArray[np.complex128]:
    """Deterministic unitary U with U x = (|x|, 0)ᵀ."""
    x = np.asarray(x, dtype=complex)
    norm = float(np.linalg.norm(x))
    if norm == 0:
        raise ZeroVector("cannot align the zero vector")
    return np.array([[np.conj(x[0]), np.conj(x[1])], [-x[1], x[0]]], dtype=complex) / norm


@dataclass(frozen=True)
class LocalData:
    """Branch data (x, y, β, R) with y x = 0 and |x|² − |y|² = 2β."""

    x: NDArray[np.complex128]
    y: NDArray[np.complex128]
    beta: float
    R: float
    check_tol: float = field(default=1e-12, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex)
        y = np.asarray(self.y, dtype=complex)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        scale = max(1.0, float(np.sum(np.abs(x) ** 2)))
        if abs(y @ x) > self.check_tol * scale:
            raise ValueError("y x must vanish")
        if abs(self.a - self.b - 2.0 * self.beta) > 10 * self.check_tol * scale:
            raise ValueError("|x|^2 - |y|^2 must equal 2 beta")
        if self.beta <= 0 or self.R < 0:
            raise ValueError("beta must be positive and R nonnegative")

    @property
    def a(self) -> float:
        return float(np.sum(np.abs(self.x) ** 2))

    @property
    def b(self) -> float:
        return float(np.sum(np.abs(self.y) ** 2))

    @property
    def beta_tilde(self) -> float:
        return 0.5 * (self.a + self.b)

    def u(self, r):
        return np.power(r, 4.0 * self.R * self.beta)

    def r_of_u(self, u):
        return np.power(u, 1.0 / (4.0 * self.R * self.beta))

    def aligned(self) -> "LocalData":
        """The same data rotated so that x = (|x|, 0)ᵀ and y = (0, y₂)."""
        U = aligned_frame(self.x)
        return LocalData(U @ self.x, self.y @ U.conj().T, self.beta, self.R, 1e-9)


@dataclass(frozen=True)
class LocalTangent:
    """Deformation (ẋ, ẏ) with ẏx + yẋ = 0 and x†ẋ − ẏy† = 0."""

    xdot: NDArray[np.complex128]
    ydot: NDArray[np.complex128]

    def __post_init__(self):
        object.__setattr__(self, "xdot", np.asarray(self.xdot, dtype=complex))
        object.__setattr__(self, "ydot", np.asarray(self.ydot, dtype=complex))


def check_local_tangent(d: LocalData, t: LocalTangent, tol: float = 1e-10) -> bool:
    """Both tangent constraints, each to the given tolerance."""
    c1 = t.ydot @ d.x + d.y @ t.xdot
    c2 = np.conj(d.x) @ t.xdot - t.ydot @ np.conj(d.y)
    return bool(abs(c1) <= tol and abs(c2) <= tol)


def aligned_tangent(d: LocalData, t: LocalTangent):
    """Components (ẋ₁, ẋ₂, ẏ₁, ẏ₂) in the frame where x = (|x|, 0)ᵀ."""
    U = aligned_frame(d.x)
    xd = U @ t.xdot
    yd = t.ydot @ U.conj().T
    return xd[0], xd[1], yd[0], yd[1]


def lambda_loc(d: LocalData, r) -> float:
    """The radial solution λ(r); positive on its domain, λ(1) = 1."""
    r = np.asarray(r, dtype=float)
    u = d.u(r)
    denom = d.a - d.b * u
    if np.any(r <= 0) or np.any(denom <= 0):
        raise OutOfDomain("radius outside the domain of the model")
    return 2.0 * d.beta * np.power(r, 2.0 * d.R * d.beta) / denom


def dlog_lambda_coeff(d: LocalData, r):
    """Coefficient c(r) in ∂ log λ = c(r) dz/z (and ∂̄ log λ = c(r) dz̄/z̄)."""
    u = d.u(np.asarray(r, dtype=float))
    return d.R * d.beta * (d.a + d.b * u) / (d.a - d.b * u)


def n_matrix(x) -> NDArray[np.complex128]:
    """N = 2 (x x†)^⊥ / |x|²; traceless hermitian with N² = Id."""
    x = np.asarray(x, dtype=complex)
    nx2 = float(np.sum(np.abs(x) ** 2))
    if nx2 == 0:
        raise ZeroVector("n_matrix requires x != 0")
    return 2.0 * mat2.traceless(np.outer(x, np.conj(x))) / nx2


def h_loc(d: LocalData, z: complex, hdet: float) -> NDArray[np.complex128]:
    """Metric √hdet · exp(N log λ) at z (frame of the ambient trivialization)."""
    r = abs(z)
    lam = float(lambda_loc(d, r))
    N = n_matrix(d.x)
    L = np.log(lam)
    # exp(N L) = cosh(L) Id + sinh(L) N since N² = Id
    return np.sqrt(hdet) * (np.cosh(L) * mat2.ID2 + np.sinh(L) * N)


def hitchin_residual_local(d: LocalData, z: complex, step: float) -> float:
    """Absolute defect of ∂̄∂ log λ = R² λ² |x|²|y|² r⁻² dz̄∧dz by FD.

    The left side is ¼ of the five-point finite-difference Laplacian of
    log λ in the adapted coordinates (s, θ) = (log u, arg z) with
    u = r^{4Rβ}, where Δ = r⁻²((4Rβ)²∂²_s + ∂²_θ); second-order accurate
    in the step.  Differencing in s keeps the conical term 2Rβ log r
    exactly harmonic at the discrete level and equidistributes the
    remaining smooth profile, so the measured defect reflects the
    equation rather than coordinate-grid truncation error.
    """

    p = 4.0 * d.R * d.beta

    def f(s):
        u = np.exp(s)
        return float(0.5 * s - np.log(d.a - d.b * u))

    r = abs(z)
    s0 = p * np.log(r)
    d2s = (f(s0 + step) + f(s0 - step) - 2.0 * f(s0)) / step**2
    # the θ second difference of the radial profile vanishes identically
    lap = p**2 * d2s / r**2
    lam = float(lambda_loc(d, r))
    rhs = d.R**2 * lam**2 * d.a * d.b / r**2
    return abs(0.25 * lap - rhs)


def glue_gap(d: LocalData, r: float):
    """Gaps between the model and its flat conical approximation at radius r.

    Returns (|log λ − 2Rβ̃ log r|, ∂-gap, ∂̄-gap) where the derivative gaps
    are the magnitudes of the closed-form coefficient differences divided by
    r; all three decay like R² on fixed annuli.
    """
    lam = float(lambda_loc(d, r))
    g0 = abs(np.log(lam) - 2.0 * d.R * d.beta_tilde * np.log(r))
    gd = abs(dlog_lambda_coeff(d, r) - d.R * d.beta_tilde) / r
    return g0, gd, gd


def nu_loc(d: LocalData, t: LocalTangent, z: complex) -> NDArray[np.complex128]:
    """First variation of the model metric, in the aligned frame.

    Lower-triangular traceless with
    ν̇₁₁ = ẏ₂ȳ₂ (r^{4Rβ} − 1)/(|x|² − |y|² r^{4Rβ}) and
    ν̇₂₁ = (λ² − 1) ẋ₂/x₁; vanishes at r = 1 and, pointwise, as R → 0.
    """
    r = abs(z)
    u = float(d.u(r))
    denom = d.a - d.b * u
    if r <= 0 or denom <= 0:
        raise OutOfDomain("radius outside the domain of the model")
    _, xd2, _, yd2 = aligned_tangent(d, t)
    da = d.aligned()
    y2 = da.y[1]
    lam = float(lambda_loc(d, r))
    nu11 = yd2 * np.conj(y2) * (u - 1.0) / denom
    nu21 = (lam**2 - 1.0) * xd2 / da.x[0]
    return np.array([[nu11, 0.0], [nu21, -nu11]], dtype=complex)


def dbar_nu_loc(d: LocalData, t: LocalTangent, z: complex) -> NDArray[np.complex128]:
    """Closed-form coefficient A with ∂̄ν̇ = A dz̄ (aligned frame)."""
    r = abs(z)
    lam = float(lambda_loc(d, r))
    _, xd2, _, yd2 = aligned_tangent(d, t)
    da = d.aligned()
    y2 = da.y[1]
    c = dlog_lambda_coeff(d, r)
    a11 = d.R * yd2 * np.conj(y2) * lam**2 / np.conj(z)
    a21 = 2.0 * (xd2 / da.x[0]) * lam**2 * c / np.conj(z)
    return np.array([[a11, 0.0], [a21, -a11]], dtype=complex)


def _phi_aligned(d: LocalData, z: complex) -> NDArray[np.complex128]:
    da = d.aligned()
    return np.outer(da.x, da.y) / z


def _phi_dot_aligned(d: LocalData, t: LocalTangent, z: complex) -> NDArray[np.complex128]:
    da = d.aligned()
    xd1, xd2, yd1, yd2 = aligned_tangent(d, t)
    xd = np.array([xd1, xd2])
    yd = np.array([yd1, yd2])
    return (np.outer(xd, da.y) + np.outer(da.x, yd)) / z


def coulomb_residual_local(d: LocalData, t: LocalTangent, z: complex, step: float) -> float:
    """Relative defect of the Coulomb gauge equation by nested FD.

    Evaluates ‖R⁻¹(∂_z A + [h⁻¹∂_z h, A]) + R[φ^{†h}, φ̇ + [ν̇, φ]]‖_F with
    A = ∂_z̄ ν̇, normalized by the magnitudes of the two terms.  In the
    aligned frame ν̇ is a radial profile in s = log u with u = r^{4Rβ}, so
    both derivative layers reduce to central differences in s alone:
    ∂_z̄ ν̇ = (4Rβ) ∂_s ν̇ / (2z̄) and ∂_z(w/z̄) = (4Rβ)² ∂²_s ν̇ / (4r²) for
    radial w; second-order accurate with step-independent scale.
    """
    p = 4.0 * d.R * d.beta
    r = abs(z)
    s0 = p * np.log(r)

    # difference ν̇ minus its exact u → 0 limit, written in a form that is
    # manifestly O(u): ν̇₁₁ + ẏ₂ȳ₂/a = ẏ₂ȳ₂·2βu/(a(a−bu)) and
    # ν̇₂₁ + ẋ₂/x₁ = λ²ẋ₂/x₁.  Differencing the raw ν̇ instead would commit
    # roundoff of the O(1) constant part, amplified by 1/step².
    da = d.aligned()
    t_aligned = aligned_tangent(d, t)
    xd2, yd2 = t_aligned[1], t_aligned[3]
    c11 = yd2 * np.conj(da.y[1]) * 2.0 * d.beta / d.a
    c21 = xd2 / da.x[0]

    def nu_s(s):
        u = np.exp(s)
        denom = d.a - d.b * u
        lam_sq = (2.0 * d.beta) ** 2 * u / denom**2
        g11 = c11 * u / denom
        return np.array([[g11, 0.0], [c21 * lam_sq, -g11]], dtype=complex)

    first = (nu_s(s0 + step) - nu_s(s0 - step)) / (2 * step)
    second = (nu_s(s0 + step) - 2.0 * nu_s(s0) + nu_s(s0 - step)) / step**2
    Az = p * first / (2.0 * np.conj(z))
    dzA = p**2 * second / (4.0 * r**2)
    c = complex(dlog_lambda_coeff(d, abs(z))) / z
    N0 = np.diag([1.0, -1.0]).astype(complex)
    hdh = c * N0
    term1 = (dzA + hdh @ Az - Az @ hdh) / d.R
    lam = float(lambda_loc(d, abs(z)))
    h = np.diag([lam, 1.0 / lam]).astype(complex)
    Phi = _phi_aligned(d, z)
    Phid = _phi_dot_aligned(d, t, z)
    nu = nu_loc(d, t, z)
    Phitot = Phid + nu @ Phi - Phi @ nu
    Pdag = mat2.adjoint_wrt(h, Phi)
    term2 = d.R * (Pdag @ Phitot - Phitot @ Pdag)
    denom = max(mat2.frob(term1), mat2.frob(term2), 1e-30)
    return mat2.frob(term1 + term2) / denom


def metric_variation_check(d: LocalData, t: LocalTangent, tstep: float) -> float:
    """Sup defect ‖exp(tν̇†) h(0) exp(tν̇) − h(t)‖_F over sample points.

    h(t) is the model metric of the perturbed data (x + tẋ, y + tẏ); the
    defect is O(t²) precisely because ν̇ is the first variation.
    """
    da = d.aligned()
    xd1, xd2, yd1, yd2 = aligned_tangent(d, t)
    xt = da.x + tstep * np.array([xd1, xd2])
    yt = da.y + tstep * np.array([yd1, yd2])
    beta_t = 0.5 * float(np.sum(np.abs(xt) ** 2) - np.sum(np.abs(yt) ** 2))
    dt = LocalData(xt, yt, beta_t, d.R, check_tol=10 * abs(tstep) + 1e-12)
    worst = 0.0
    for r in (0.15, 0.35, 0.6, 0.85):
        z = r * np.exp(0.37j)
        lam0 = float(lambda_loc(d, r))
        h0 = np.diag([lam0, 1.0 / lam0]).astype(complex)
        nu = nu_loc(d, t, z)
        E = mat2.ID2 + tstep * nu + (tstep * nu) @ (tstep * nu) / 2.0
        moved = mat2.dagger(E) @ h0 @ E
        ht = h_loc(dt, z, 1.0)
        worst = max(worst, mat2.frob(moved - ht))
    return worst


# ---------------------------------------------------------------------------
# Integral evaluators
# ---------------------------------------------------------------------------


def gauss_u(d: LocalData, g, u_lo: float, u_hi: float, npts: int = 96) -> complex:
    """Gauss–Legendre integral of g(u) over [u_lo, u_hi]."""
    nodes, weights = np.polynomial.legendre.leggauss(npts)
    mid = 0.5 * (u_hi + u_lo)
    half = 0.5 * (u_hi - u_lo)
    total = 0.0 + 0.0j
    for xi, w in zip(nodes, weights):
        total += w * g(mid + half * xi)
    return half * total


def disk_curvature_closed(d: LocalData, delta: float) -> float:
    """Closed value (coefficient of i) of ∫_{B_δ} R⁻¹ ∂̄∂ log λ.

    Stokes against the boundary values of ∂ log λ gives
    2πβ [(|x|² + |y|² δ^{4Rβ})/(|x|² − |y|² δ^{4Rβ}) − 1]; tends to 2π|y|²
    as R → 0.
    """
    u = float(d.u(delta))
    denom = d.a - d.b * u
    if denom <= 0:
        raise OutOfDomain("delta outside the domain of the model")
    return TWO_PI * d.beta * ((d.a + d.b * u) / denom - 1.0)


def disk_curvature_quad(
    d: LocalData,
    delta: float,
    n_radial: int = 512,
    n_angular: int = 64,
    r_min: float = 1e-8,
    fd_step: float = 1e-3,
) -> float:
    """Polar-grid quadrature of ∫_{B_δ} R⁻¹ ∂̄∂ log λ (coefficient of i).

    The radial grid is geometric from r_min to δ with a Simpson rule in
    t = log r; the integrand ¼Δ log λ = ¼ r⁻² ∂²_t log λ (radial profile)
    is evaluated by a fourth-order central difference in t, where the
    profile is smooth with step-independent derivative scale.  The
    analytically known mass below r_min is added as a closed-form tail.
    """

    def f(t):
        return np.log(lambda_loc(d, np.exp(t)))

    s = np.linspace(np.log(r_min), np.log(delta), 2 * (n_radial // 2) + 1)
    r = np.exp(s)
    h = fd_step
    d2t = (
        -f(s + 2 * h) + 16.0 * f(s + h) - 30.0 * f(s)
        + 16.0 * f(s - h) - f(s - 2 * h)
    ) / (12.0 * h**2)
    lap = d2t / r**2
    integrand = 0.25 * lap / d.R  # value of R⁻¹ ∂̄∂ coefficient
    # Simpson in log r of integrand * r², then angular factor and the
    # coefficient-of-i normalization 2 dx dy per dz̄∧dz.
    w = np.ones_like(s)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    hs = s[1] - s[0]
    radial = np.sum(w * integrand * r**2) * hs / 3.0
    theta = np.linspace(0.0, TWO_PI, n_angular, endpoint=False)
    value = 2.0 * radial * (TWO_PI / len(theta)) * len(theta)
    return float(value + disk_curvature_closed(d, r_min))


def disk_curvature_integral(d: LocalData, delta: float, **kw):
    """(closed, quadrature) pair for the disk curvature integral."""
    return disk_curvature_closed(d, delta), disk_curvature_quad(d, delta, **kw)


def boundary_pairing(d: LocalData, t: LocalTangent) -> float:
    """Boundary term of the pairing, coefficient of i: 2π(|ẋ₂|² − |ẏ₁|²).

    The shrinking-circle limit of ∮ R⁻¹⟨ν̇, ∂̄ν̇⟩_h is independent of R: the
    λ-dependent pieces vanish as the radius shrinks, and ∂̄ log λ → Rβ dz̄/z̄
    with ∮ dz̄/z̄ = −2πi, leaving 2πi·2β|ẋ₂|²/|x|² = 2πi(|ẋ₂|² − |ẏ₁|²).
    """
    _, xd2, yd1, _ = aligned_tangent(d, t)
    return TWO_PI * (abs(xd2) ** 2 - abs(yd1) ** 2)


def _bulk_u_integrand(d: LocalData, t: LocalTangent):
    """g(u) with bulk pairing = 4π ∫ g(u) du (complex-valued)."""
    da = d.aligned()
    x1 = da.x[0]
    y2 = da.y[1]
    xd1, xd2, yd1, yd2 = aligned_tangent(d, t)
    phid12 = xd1 * y2 + x1 * yd2
    a, b, beta = d.a, d.b, d.beta
    pref = (2.0 * beta) ** 2 / (4.0 * beta)

    def g(u):
        denom = a - b * u
        nu11 = yd2 * np.conj(y2) * (u - 1.0) / denom
        semis = 2.0 * a * abs(yd1) ** 2
        upper = np.conj(phid12) * (phid12 + 2.0 * nu11 * x1 * y2)
        return pref * (semis + upper) / denom**2

    return g


def bulk_pairing(
    d: LocalData, t: LocalTangent, delta: float, npts: int = 128
):
    """(closed limit, finite-R quadrature) of ∫_{B_δ} R⟨φ̇, φ̇+[ν̇,φ]⟩_h.

    The closed limit is 2π(2|ẏ₁|² + |ẋ₁|² + |ẏ₂|²); the quadrature is the
    exact finite-R radial integral in the variable u = r^{4Rβ} and converges
    to the closed value as R → 0 for any fixed δ ∈ (0, 1].
    """
    u_hi = float(d.u(delta))
    if d.a - d.b * u_hi <= 0:
        raise OutOfDomain("delta outside the domain of the model")
    _, xd2, yd1, yd2 = aligned_tangent(d, t)
    xd1 = aligned_tangent(d, t)[0]
    closed = TWO_PI * (2.0 * abs(yd1) ** 2 + abs(xd1) ** 2 + abs(yd2) ** 2)
    g = _bulk_u_integrand(d, t)
    quad = 4.0 * np.pi * gauss_u(d, g, 0.0, u_hi, npts)
    return closed, float(np.real(quad))


def local_curvature_integral(
    d: LocalData, r1: float, r2: float, weight=None, npts: int = 96
) -> float:
    """Weighted ∫ R⁻¹∂̄∂ log λ over the annulus r ∈ [r1, r2] (coeff. of i)."""
    a, b, beta = d.a, d.b, d.beta

    def g(u):
        w = 1.0 if weight is None else weight(float(d.r_of_u(u)))
        return a * b * beta / (a - b * u) ** 2 * w

    lo = float(d.u(r1)) if r1 > 0 else 0.0
    return float(np.real(4.0 * np.pi * gauss_u(d, g, lo, float(d.u(r2)), npts)))


def local_bulk_integral(
    d: LocalData, t: LocalTangent, r1: float, r2: float, weight=None, npts: int = 96
) -> complex:
    """Weighted bulk pairing over the annulus r ∈ [r1, r2] (coeff. of i)."""
    g0 = _bulk_u_integrand(d, t)

    def g(u):
        w = 1.0 if weight is None else weight(float(d.r_of_u(u)))
        return g0(u) * w

    lo = float(d.u(r1)) if r1 > 0 else 0.0
    return 4.0 * np.pi * gauss_u(d, g, lo, float(d.u(r2)), npts)


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------


def random_local_data(
    rng: np.random.Generator, beta: float = None, R: float = 0.1, y_ratio: float = None
) -> LocalData:
    """Random admissible branch data."""
    if beta is None:
        beta = float(rng.uniform(0.3, 1.5))
    if y_ratio is None:
        y_ratio = float(rng.uniform(0.1, 0.7))
    a = 2.0 * beta / (1.0 - y_ratio)
    x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    x *= np.sqrt(a) / np.linalg.norm(x)
    ann = np.array([x[1], -x[0]])
    phase = np.exp(2j * np.pi * rng.uniform())
    y = phase * np.sqrt(y_ratio * a) * ann / np.linalg.norm(ann)
    return LocalData(x, y, beta, R)


def random_local_tangent(d: LocalData, rng: np.random.Generator) -> LocalTangent:
    """Random tangent solving both constraints, built in the aligned frame."""
    da = d.aligned()
    x1 = da.x[0]
    y2 = da.y[1]
    xd1 = rng.standard_normal() + 1j * rng.standard_normal()
    xd2 = rng.standard_normal() + 1j * rng.standard_normal()
    if abs(y2) > 1e-13:
        yd1 = -y2 * xd2 / x1
        yd2 = np.conj(x1) * xd1 / np.conj(y2)
    else:
        yd1 = 0.0
        xd1 = 0.0
        yd2 = rng.standard_normal() + 1j * rng.standard_normal()
    U = aligned_frame(d.x)
    xdot = U.conj().T @ np.array([xd1, xd2])
    ydot = np.array([yd1, yd2]) @ U
    return LocalTangent(xdot, ydot)
