"""The glued approximate metric on the punctured sphere and its integrals.

The metric h = √h_det · exp(χ_∞ Λ + Σ_i χ_i log λ_i N_i) interpolates the
exact single-puncture solutions (inside radius δ of each puncture) with the
flat conical metric Λ = Σ_i 2Rβ̃_i log|z − p_i| N_i.  For a unitary
representation Σ_i β̃_i N_i = 0, so Λ → 0 at infinity and the metric
extends over the whole sphere.

Integral conventions: quantities defined as coefficients of i of 2-form
integrals use dz̄∧dz = 2i dx∧dy, i.e. the reported real number is
2∬(coefficient) dxdy.  morse_integral instead reports ½∫R|φ|² with the
plain area measure, whose small-R limit is π Σ|y_i|².

All small-radius mass near the punctures is captured by evaluating the
radial local-model parts in the variable u = r^{4Rβ_i} (exact Gauss
quadrature of rational integrands) and integrating only the bounded
remainder on two-dimensional polar grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray

from . import localmodel as lm
from . import mat2
from .errors import AtPuncture, NotPositive, NotUnitary, ROutOfRange
from .higgs import r_max
from .hp_tangent import TangentHP, hp_norm_sq
from .hyperpolygon import QuiverRep, beta_array, is_unitary
from .localmodel import LocalData, LocalTangent, boundary_pairing
from .tolerances import DEFAULT, Tolerances

TWO_PI = 2.0 * np.pi
ID2 = np.eye(2, dtype=complex)


# ---------------------------------------------------------------------------
# Bump function
# ---------------------------------------------------------------------------


def _psi(t):
    out = np.zeros_like(t, dtype=float)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def bump_profile(r, delta: float):
    """C^∞ cutoff χ(r): 1 for r ≤ δ, 0 for r ≥ 2δ."""
    r = np.asarray(r, dtype=float)
    a = (2.0 * delta - r) / delta
    b = (r - delta) / delta
    pa, pb = _psi(a), _psi(b)
    out = np.ones_like(r)
    mid = (r > delta) & (r < 2.0 * delta)
    out[mid] = pa[mid] / (pa[mid] + pb[mid])
    out[r >= 2.0 * delta] = 0.0
    return out


def bump_profile_deriv(r, delta: float):
    """dχ/dr of the cutoff; supported in (δ, 2δ)."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    mid = (r > delta) & (r < 2.0 * delta)
    rm = r[mid]
    a = (2.0 * delta - rm) / delta
    b = (rm - delta) / delta
    pa, pb = np.exp(-1.0 / a), np.exp(-1.0 / b)
    dpa = pa / a**2 * (-1.0 / delta)
    dpb = pb / b**2 * (1.0 / delta)
    out[mid] = (dpa * pb - pa * dpb) / (pa + pb) ** 2
    return out


# ---------------------------------------------------------------------------
# Configuration and metric object
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ApproxMetricCfg:
    """Gluing radius, weight exponent, and quadrature node counts."""

    delta: float | None = None
    eps: float = 0.25
    n_radial: int = 12  # log-radial Gauss panels per puncture disk
    n_angular: int = 64
    ext_panels: int = 24  # radial Gauss panels, finite exterior chart
    ext_angular: int = 128
    w_panels: int = 8  # radial Gauss panels, chart at infinity
    w_angular: int = 64
    outer_chart_radius: float = 4.0
    r_min: float = 1e-8
    u_points: int = 96
    panel_points: int = 16

    def __post_init__(self):
        if not (0.0 < self.eps < 0.5):
            raise ValueError("weight exponent must lie in (0, 1/2)")


def _default_delta(p) -> float:
    n = len(p)
    d = min(abs(p[i] - p[j]) for i in range(n) for j in range(i + 1, n))
    return d / 4.0


class ApproxMetric:
    """Glued approximate metric for a unitary representation at scale R."""

    def __init__(
        self,
        rep: QuiverRep,
        punctures,
        beta,
        R: float,
        cfg: ApproxMetricCfg = ApproxMetricCfg(),
        tol: Tolerances = DEFAULT,
    ):
        beta = beta_array(beta)
        if not is_unitary(rep, beta, tol):
            raise NotUnitary("the glued metric requires a unitary representation")
        if not (0.0 < R < r_max(beta)):
            raise ROutOfRange(f"R={R} outside (0, {r_max(beta)})")
        self.rep = rep
        self.p = np.asarray(punctures, dtype=complex)
        self.beta = beta
        self.R = float(R)
        if cfg.delta is None:
            cfg = replace(cfg, delta=_default_delta(self.p))
        if 2.0 * cfg.delta > min(abs(p1 - p2) for i, p1 in enumerate(self.p)
                                 for p2 in self.p[i + 1:]) / 2.0 + 1e-15:
            raise ValueError("2δ disks must be disjoint")
        self.cfg = cfg
        n = rep.n
        self.local = [
            LocalData(rep.x[i], rep.y[i], beta[i], R, check_tol=1e-9) for i in range(n)
        ]
        self.N = np.stack([lm.n_matrix(rep.x[i]) for i in range(n)])
        self.U = [lm.aligned_frame(rep.x[i]) for i in range(n)]
        self.beta_tilde = np.array([d.beta_tilde for d in self.local])
        self.phi_res = np.stack(
            [np.outer(rep.x[i], rep.y[i]) for i in range(n)]
        )

    @property
    def n(self) -> int:
        return self.rep.n

    # -- pointwise fields ---------------------------------------------------

    def _dists(self, zs):
        zs = np.asarray(zs, dtype=complex)
        return np.abs(zs[..., None] - self.p)

    def bump(self, i: int, zs):
        return bump_profile(self._dists(zs)[..., i], self.cfg.delta)

    def bump_infinity(self, zs):
        r = self._dists(zs)
        return 1.0 - np.sum(bump_profile(r, self.cfg.delta), axis=-1)

    def exponent(self, zs) -> NDArray[np.complex128]:
        """Hermitian traceless exponent of the unimodular metric factor."""
        zs = np.asarray(zs, dtype=complex)
        r = self._dists(zs)
        if np.any(r == 0):
            raise AtPuncture("metric evaluated at a puncture")
        chi = bump_profile(r, self.cfg.delta)
        chi_inf = 1.0 - np.sum(chi, axis=-1)
        coeff = np.empty_like(r)
        for i, d in enumerate(self.local):
            ri = r[..., i]
            coeff[..., i] = chi_inf * 2.0 * self.R * self.beta_tilde[i] * np.log(ri)
            mask = chi[..., i] > 0.0
            if np.any(mask):
                lam = lm.lambda_loc(d, ri[mask])
                coeff[..., i][mask] += chi[..., i][mask] * np.log(lam)
        return np.einsum("...i,ijk->...jk", coeff, self.N)

    def h_factor(self, zs):
        """(E, E⁻¹): the positive unimodular factor of the metric and its inverse."""
        M = self.exponent(zs)
        det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
        m = np.sqrt(np.maximum(-det.real, 0.0))
        ch = np.cosh(m)
        sc = np.where(m > 1e-30, np.sinh(np.where(m > 0, m, 1.0)) / np.where(m > 0, m, 1.0), 1.0)
        E = ch[..., None, None] * ID2 + sc[..., None, None] * M
        Einv = ch[..., None, None] * ID2 - sc[..., None, None] * M
        return E, Einv

    def h_app(self, z) -> NDArray[np.complex128]:
        """Full metric √h_det · exp factor at a point."""
        E, _ = self.h_factor(np.asarray([z], dtype=complex))
        h = np.sqrt(h_det_eval(z, self.p)) * E[0]
        w = np.linalg.eigvalsh(h)
        if np.any(w <= 0):
            raise NotPositive("glued metric lost positivity (R too large)")
        return h

    def phi(self, zs) -> NDArray[np.complex128]:
        """Higgs field coefficient Σ φ_i/(z − p_i), vectorized."""
        zs = np.asarray(zs, dtype=complex)
        diff = zs[..., None] - self.p
        if np.any(diff == 0):
            raise AtPuncture("Higgs field evaluated at a puncture")
        return np.einsum("...i,ijk->...jk", 1.0 / diff, self.phi_res)

    def phi_dot(self, v: TangentHP, zs) -> NDArray[np.complex128]:
        zs = np.asarray(zs, dtype=complex)
        res = np.stack(
            [
                np.outer(v.xdot[i], self.rep.y[i]) + np.outer(self.rep.x[i], v.ydot[i])
                for i in range(self.n)
            ]
        )
        diff = zs[..., None] - self.p
        return np.einsum("...i,ijk->...jk", 1.0 / diff, res)

    def local_tangent(self, v: TangentHP, i: int) -> LocalTangent:
        return LocalTangent(v.xdot[i], v.ydot[i])

    def nu_app(self, v: TangentHP, zs) -> NDArray[np.complex128]:
        """Glued first variation Σ χ_i ν̇_i, in the global frame; vectorized."""
        zs = np.asarray(zs, dtype=complex)
        out = np.zeros(zs.shape + (2, 2), dtype=complex)
        r = self._dists(zs)
        for i, d in enumerate(self.local):
            ri = r[..., i]
            mask = ri < 2.0 * self.cfg.delta
            if not np.any(mask):
                continue
            chi = bump_profile(ri[mask], self.cfg.delta)
            t = self.local_tangent(v, i)
            n11, n21 = _nu_entries(d, t, ri[mask])
            nu = np.zeros(n11.shape + (2, 2), dtype=complex)
            nu[..., 0, 0] = n11
            nu[..., 1, 1] = -n11
            nu[..., 1, 0] = n21
            U = self.U[i]
            out[mask] += chi[..., None, None] * np.einsum(
                "ab,...bc,cd->...ad", U.conj().T, nu, U
            )
        return out


def _nu_entries(d: LocalData, t: LocalTangent, r):
    """Aligned-frame entries (ν̇₁₁, ν̇₂₁) of the local first variation."""
    u = d.u(np.asarray(r, dtype=float))
    denom = d.a - d.b * u
    _, xd2, _, yd2 = lm.aligned_tangent(d, t)
    da = d.aligned()
    lam2 = (2.0 * d.beta) ** 2 * u / denom**2
    n11 = yd2 * np.conj(da.y[1]) * (u - 1.0) / denom
    n21 = (lam2 - 1.0) * xd2 / da.x[0]
    return n11, n21


def h_det_eval(z, punctures) -> float:
    """Determinant profile (1+|z|²)^{−n} Π|z−p_i|²."""
    p = np.asarray(punctures, dtype=complex)
    z = complex(z)
    return float(
        (1.0 + abs(z) ** 2) ** (-len(p)) * np.prod(np.abs(z - p) ** 2)
    )


# ---------------------------------------------------------------------------
# Quadrature grids
# ---------------------------------------------------------------------------


def _panel_gauss(lo: float, hi: float, panels: int, pts: int):
    """Composite Gauss–Legendre nodes/weights on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(pts)
    edges = np.linspace(lo, hi, panels + 1)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (a + b) + 0.5 * (b - a) * x)
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _disk_grid(m: ApproxMetric, i: int, r_hi: float):
    """Polar nodes (z, area weights) on r_min < |z − p_i| < r_hi.

    Log-radial composite Gauss × uniform angles; exact for smooth
    integrands of the product form after the r² Jacobian in log r.
    """
    cfg = m.cfg
    s, ws = _panel_gauss(np.log(cfg.r_min), np.log(r_hi), cfg.n_radial, cfg.panel_points)
    r = np.exp(s)
    th = TWO_PI * (np.arange(cfg.n_angular) + 0.5) / cfg.n_angular
    zz = m.p[i] + r[:, None] * np.exp(1j * th)[None, :]
    ww = (ws * r**2)[:, None] * (TWO_PI / cfg.n_angular) * np.ones_like(th)[None, :]
    return zz.ravel(), ww.ravel()


def _ext_grid(m: ApproxMetric):
    """Polar nodes/weights covering |z| ≤ outer_chart_radius."""
    cfg = m.cfg
    r, wr = _panel_gauss(0.0, cfg.outer_chart_radius, cfg.ext_panels, cfg.panel_points)
    th = TWO_PI * (np.arange(cfg.ext_angular) + 0.5) / cfg.ext_angular
    zz = r[:, None] * np.exp(1j * th)[None, :]
    ww = (wr * r)[:, None] * (TWO_PI / cfg.ext_angular) * np.ones_like(th)[None, :]
    return zz.ravel(), ww.ravel()


def _w_grid(m: ApproxMetric):
    """Nodes z = 1/w and area weights for |z| > outer_chart_radius.

    dxdy_z = dudv_w / |w|⁴; the weight already contains the Jacobian.
    """
    cfg = m.cfg
    rw, wr = _panel_gauss(1e-9, 1.0 / cfg.outer_chart_radius, cfg.w_panels, cfg.panel_points)
    th = TWO_PI * (np.arange(cfg.w_angular) + 0.5) / cfg.w_angular
    ww_pts = rw[:, None] * np.exp(1j * th)[None, :]
    zz = 1.0 / ww_pts
    jac = (wr * rw)[:, None] * (TWO_PI / cfg.w_angular) / np.abs(ww_pts) ** 4
    return zz.ravel(), jac.ravel()


# ---------------------------------------------------------------------------
# Integrand fields
# ---------------------------------------------------------------------------


def _tr(A, B):
    return np.einsum("...ij,...ji->...", A, B)


def _adjoint(E, Einv, A):
    """h-adjoint E⁻¹ A† E for the unimodular factor."""
    return np.einsum("...ij,...jk,...kl->...il", Einv, np.conj(np.swapaxes(A, -1, -2)), E)


def _morse_field(m: ApproxMetric, zs):
    """R tr(φ^{†h} φ) at the nodes (real)."""
    E, Einv = m.h_factor(zs)
    P = m.phi(zs)
    return m.R * np.real(_tr(_adjoint(E, Einv, P), P))


def _morse_field_local(m: ApproxMetric, i: int, zs):
    """Local-model radial version R λ² a b / r² for branch i."""
    d = m.local[i]
    r = np.abs(np.asarray(zs, dtype=complex) - m.p[i])
    lam = lm.lambda_loc(d, r)
    return m.R * lam**2 * d.a * d.b / r**2


def _pair_field(m: ApproxMetric, v: TangentHP, zs):
    """R tr(φ̇^{†h} (φ̇ + [ν̇_app, φ])) at the nodes (complex)."""
    E, Einv = m.h_factor(zs)
    P = m.phi(zs)
    Pd = m.phi_dot(v, zs)
    nu = m.nu_app(v, zs)
    corr = Pd + np.einsum("...ij,...jk->...ik", nu, P) - np.einsum(
        "...ij,...jk->...ik", P, nu
    )
    return m.R * _tr(_adjoint(E, Einv, Pd), corr)


def _pair_field_local(m: ApproxMetric, i: int, v: TangentHP, zs):
    """Radial local-model pairing integrand for branch i (complex)."""
    d = m.local[i]
    t = m.local_tangent(v, i)
    r = np.abs(np.asarray(zs, dtype=complex) - m.p[i])
    u = d.u(r)
    denom = d.a - d.b * u
    lam2 = (2.0 * d.beta) ** 2 * u / denom**2
    da = d.aligned()
    x1, y2 = da.x[0], da.y[1]
    xd1, _, yd1, yd2 = lm.aligned_tangent(d, t)
    phid12 = xd1 * y2 + x1 * yd2
    n11 = yd2 * np.conj(y2) * (u - 1.0) / denom
    semis = 2.0 * lam2 * d.a * abs(yd1) ** 2
    upper = lam2 * np.conj(phid12) * (phid12 + 2.0 * n11 * x1 * y2)
    return m.R * (semis + upper) / r**2


# ---------------------------------------------------------------------------
# Reported integrals
# ---------------------------------------------------------------------------


def _chi_weighted_sum(m: ApproxMetric, field, field_local):
    """Σ_i ∬ χ_i (field − field_local,i) + ∬ χ_∞ field over both charts."""
    total = 0.0 + 0.0j
    two_delta = 2.0 * m.cfg.delta
    for i in range(m.n):
        zz, ww = _disk_grid(m, i, two_delta)
        chi = m.bump(i, zz)
        vals = chi * (field(zz) - field_local(i, zz))
        total += np.sum(vals * ww)
    for zz, ww in (_ext_grid(m), _w_grid(m)):
        chi_inf = m.bump_infinity(zz)
        mask = chi_inf > 0.0
        if np.any(mask):
            total += np.sum(chi_inf[mask] * field(zz[mask]) * ww[mask])
    return total


def morse_integral(m: ApproxMetric) -> float:
    """½ ∫ R|φ|²_h over the sphere; → π Σ|y_i|² as R → 0."""
    two_delta = 2.0 * m.cfg.delta

    def chi(i):
        return lambda r: float(bump_profile(np.asarray([r]), m.cfg.delta)[0])

    local = sum(
        0.5 * lm.local_curvature_integral(d, 0.0, two_delta, weight=chi(i), npts=m.cfg.u_points)
        for i, d in enumerate(m.local)
    )
    remainder = _chi_weighted_sum(m, lambda zs: _morse_field(m, zs),
                                  lambda i, zs: _morse_field_local(m, i, zs))
    return float(local + np.real(remainder))


def metric_pairing(m: ApproxMetric, v: TangentHP) -> float:
    """Boundary terms plus bulk quadrature; → 2π Σ(|ẋ|²+|ẏ|²) as R → 0."""
    two_delta = 2.0 * m.cfg.delta
    boundary = sum(
        boundary_pairing(d, m.local_tangent(v, i)) for i, d in enumerate(m.local)
    )

    def chi(i):
        return lambda r: float(bump_profile(np.asarray([r]), m.cfg.delta)[0])

    local = sum(
        np.real(
            lm.local_bulk_integral(
                d, m.local_tangent(v, i), 0.0, two_delta, weight=chi(i), npts=m.cfg.u_points
            )
        )
        for i, d in enumerate(m.local)
    )
    remainder = _chi_weighted_sum(
        m,
        lambda zs: _pair_field(m, v, zs),
        lambda i, zs: _pair_field_local(m, i, v, zs),
    )
    # the bulk is a coefficient of i: 2 dxdy per dz̄∧dz
    return float(boundary + local + 2.0 * np.real(remainder))


# ---------------------------------------------------------------------------
# Hitchin residual
# ---------------------------------------------------------------------------


def hitchin_residual_global(m: ApproxMetric, z: complex, step: float) -> NDArray[np.complex128]:
    """FD residual matrix (∂_z̄(h⁻¹∂_z h))^⊥ − R²[φ, h⁻¹φ†h] at z."""
    return _residual_fd(m, np.asarray([z], dtype=complex), step)[0]


def _residual_fd(m: ApproxMetric, zs, step: float):
    zs = np.asarray(zs, dtype=complex)

    def Wfield(pts):
        E, Einv = m.h_factor(pts)

        def dh(shift):
            Ep, _ = m.h_factor(pts + shift)
            Emm, _ = m.h_factor(pts - shift)
            return (Ep - Emm) / (2.0 * step)

        dzh = 0.5 * (dh(step) - 1j * dh(1j * step))
        return np.einsum("...ij,...jk->...ik", Einv, dzh)

    dW = 0.5 * (
        (Wfield(zs + step) - Wfield(zs - step)) / (2.0 * step)
        + 1j * (Wfield(zs + 1j * step) - Wfield(zs - 1j * step)) / (2.0 * step)
    )
    tr = dW[..., 0, 0] + dW[..., 1, 1]
    curv = dW.copy()
    curv[..., 0, 0] -= 0.5 * tr
    curv[..., 1, 1] -= 0.5 * tr
    E, Einv = m.h_factor(zs)
    P = m.phi(zs)
    Pa = _adjoint(E, Einv, P)
    comm = np.einsum("...ij,...jk->...ik", P, Pa) - np.einsum(
        "...ij,...jk->...ik", Pa, P
    )
    return curv - m.R**2 * comm


def _residual_in_disk(m: ApproxMetric, i: int, zs):
    """Closed-form residual matrix inside B_δ(p_i), where h equals the local model."""
    zs = np.asarray(zs, dtype=complex)
    d = m.local[i]
    r = np.abs(zs - m.p[i])
    lam = lm.lambda_loc(d, r)
    curv = (m.R**2 * lam**2 * d.a * d.b / r**2)[..., None, None] * m.N[i]
    # metric factor inside the disk: exp(N_i log λ)
    L = np.log(lam)
    E = np.cosh(L)[..., None, None] * ID2 + np.sinh(L)[..., None, None] * m.N[i]
    Einv = np.cosh(L)[..., None, None] * ID2 - np.sinh(L)[..., None, None] * m.N[i]
    P = m.phi(zs)
    Pa = _adjoint(E, Einv, P)
    comm = np.einsum("...ij,...jk->...ik", P, Pa) - np.einsum(
        "...ij,...jk->...ik", Pa, P
    )
    return curv - m.R**2 * comm


def _h_norm_sq(E, Einv, A):
    """|A|²_h = tr(A A^{†h}) for the unimodular factor (real, ≥ 0)."""
    return np.real(_tr(A, _adjoint(E, Einv, A)))


def disk_weighted_residual_sq(m: ApproxMetric) -> list[float]:
    """Per-disk values of ∬_{B_δ} r^{2ε} |residual|²_h dxdy.

    Uses the closed-form in-disk residual (the glued metric equals the
    local model there); scales like R³ as R → 0.
    """
    eps = m.cfg.eps
    out = []
    for i in range(m.n):
        zz, ww = _disk_grid(m, i, m.cfg.delta)
        r = np.abs(zz - m.p[i])
        res = _residual_in_disk(m, i, zz)
        d = m.local[i]
        lam = lm.lambda_loc(d, r)
        L = np.log(lam)
        E = np.cosh(L)[..., None, None] * ID2 + np.sinh(L)[..., None, None] * m.N[i]
        Einv = np.cosh(L)[..., None, None] * ID2 - np.sinh(L)[..., None, None] * m.N[i]
        out.append(float(np.sum(r ** (2 * eps) * _h_norm_sq(E, Einv, res) * ww)))
    return out


def weighted_residual_norm(m: ApproxMetric, step: float = 1e-4) -> float:
    """Weighted squared L² norm of the residual over the sphere.

    The disks contribute the analytic weighted integrals of
    disk_weighted_residual_sq; the gluing annuli and the far region
    contribute plain FD-residual L² integrals.
    """
    total = sum(disk_weighted_residual_sq(m))
    # exterior: gluing annuli and the far region, FD residual
    for i in range(m.n):
        zz, ww = _disk_grid(m, i, 2.0 * m.cfg.delta)
        r = np.abs(zz - m.p[i])
        mask = r > m.cfg.delta * (1.0 + 10.0 * step)
        if not np.any(mask):
            continue
        res = _residual_fd(m, zz[mask], step)
        E, Einv = m.h_factor(zz[mask])
        total += float(np.sum(_h_norm_sq(E, Einv, res) * ww[mask]))
    for zz, ww in (_ext_grid(m), _w_grid(m)):
        chi_inf = m.bump_infinity(zz)
        mask = (chi_inf >= 1.0 - 1e-12) & (np.min(np.abs(zz[:, None] - m.p), axis=1) > 20 * step)
        if np.any(mask):
            res = _residual_fd(m, zz[mask], step)
            E, Einv = m.h_factor(zz[mask])
            total += float(np.sum(_h_norm_sq(E, Einv, res) * ww[mask]))
    return float(total)


# ---------------------------------------------------------------------------
# Symplectic pullback
# ---------------------------------------------------------------------------

# Overall sign pinned once against 2π·hp_symplectic on random data; the
# pairing below is the i-coefficient of ∫ tr(∂̄(χν̇₁) ∧ Φ̇₂) − (1 ↔ 2).
SYMPLECTIC_SIGN = -1.0


def symplectic_pullback(m: ApproxMetric, v1: TangentHP, v2: TangentHP) -> float:
    """Pullback of the holomorphic symplectic pairing; → 2π·hp_symplectic.

    After integrating over circles around each puncture, every term
    involving the holomorphic parts of φ and φ̇ from the other punctures
    vanishes identically, leaving exact radial integrals evaluated by Gauss
    quadrature in u = r^{4Rβ} (inside δ) and in r (gluing annulus).
    """
    delta = m.cfg.delta
    total = 0.0 + 0.0j
    for i, d in enumerate(m.local):
        t1 = m.local_tangent(v1, i)
        t2 = m.local_tangent(v2, i)
        total += _disk_symplectic(m, d, t1, t2) - _disk_symplectic(m, d, t2, t1)
    return float(SYMPLECTIC_SIGN * np.real(total))


def _disk_symplectic(m: ApproxMetric, d: LocalData, t1: LocalTangent, t2: LocalTangent):
    """4π ∫₀^{2δ} tr(P₁(r) Q₂(r)) dr with the angular reduction built in.

    P₁ = χ'ν̇₁/2 + χ G₁/r where ∂̄(χν̇₁) = e^{iθ}(χ'ν̇₁/2 + χG₁/r)dz̄ and
    Q₂/r·e^{-iθ} is the polar part of φ̇₂ + [χν̇₂, φ] (aligned frame).
    """
    delta = m.cfg.delta
    da = d.aligned()
    x1, y2 = da.x[0], da.y[1]
    xd1_1, xd2_1, yd1_1, yd2_1 = lm.aligned_tangent(d, t1)
    xd1_2, _, _, yd2_2 = lm.aligned_tangent(d, t2)
    phid12_2 = xd1_2 * y2 + x1 * yd2_2
    # residue of φ̇₂ (aligned, traceless): x₁ẏ₁⁽²⁾ diag(1,−1) + φ̇₁₂⁽²⁾E₁₂
    yd1_2 = lm.aligned_tangent(d, t2)[2]
    a, b, beta, R = d.a, d.b, d.beta, m.R

    def trPQ(r, chi, dchi):
        u = d.u(r)
        denom = a - b * u
        lam2 = (2.0 * beta) ** 2 * u / denom**2
        c = R * beta * (a + b * u) / denom
        # entries of ν̇₁ and G₁ = r·(∂̄ν̇₁ polar coefficient)
        n11_1 = yd2_1 * np.conj(y2) * (u - 1.0) / denom
        n21_1 = (lam2 - 1.0) * xd2_1 / x1
        g11_1 = R * yd2_1 * np.conj(y2) * lam2
        g21_1 = 2.0 * (xd2_1 / x1) * lam2 * c
        p11 = dchi * n11_1 / 2.0 + chi * g11_1 / r
        p21 = dchi * n21_1 / 2.0 + chi * g21_1 / r
        # Q₂ = φ̇₂-residue + χ[ν̇₂, φ-residue]
        n11_2 = yd2_2 * np.conj(y2) * (u - 1.0) / denom
        n21_2 = (lam2 - 1.0) * lm.aligned_tangent(d, t2)[1] / x1
        q11 = x1 * yd1_2 - chi * x1 * y2 * n21_2
        q22 = -x1 * yd1_2 + chi * x1 * y2 * n21_2
        q12 = phid12_2 + chi * 2.0 * n11_2 * x1 * y2
        # P lower-triangular: tr(PQ) = p11(q11 − q22) + p21 q12
        return p11 * (q11 - q22) + p21 * q12

    # inside δ: χ = 1, χ' = 0; the integrand tr(G₁Q₂)/r dr is rational in
    # the variable u = r^{4Rβ} (dr/r = du/(4Rβu), λ² carries a factor u)
    def g_inner(u):
        denom = a - b * u
        lam2 = (2.0 * beta) ** 2 * u / denom**2
        c = R * beta * (a + b * u) / denom
        g11 = R * yd2_1 * np.conj(y2) * lam2
        g21 = 2.0 * (xd2_1 / x1) * lam2 * c
        n11_2 = yd2_2 * np.conj(y2) * (u - 1.0) / denom
        n21_2 = (lam2 - 1.0) * lm.aligned_tangent(d, t2)[1] / x1
        q_diag = 2.0 * (x1 * yd1_2 - x1 * y2 * n21_2)
        q12 = phid12_2 + 2.0 * n11_2 * x1 * y2
        return (g11 * q_diag + g21 * q12) / (4.0 * R * beta * u)

    inner = lm.gauss_u(d, g_inner, 0.0, float(d.u(delta)), m.cfg.u_points)
    # annulus: smooth in r
    nodes, wts = _panel_gauss(delta, 2.0 * delta, 4, m.cfg.panel_points)
    chi = bump_profile(nodes, delta)
    dchi = bump_profile_deriv(nodes, delta)
    annulus = np.sum(trPQ(nodes, chi, dchi) * wts)
    return 4.0 * np.pi * (inner + annulus)


# ---------------------------------------------------------------------------
# R sweeps
# ---------------------------------------------------------------------------


def glue_gap_max(m: ApproxMetric) -> float:
    """Largest gluing gap over branches at radius δ (all components)."""
    return max(
        max(lm.glue_gap(d, m.cfg.delta)) for d in m.local
    )


def _fit_slope(Rs, errs):
    Rs = np.asarray(Rs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    good = errs > 0
    if np.sum(good) < 2:
        return float("nan")
    A = np.stack([np.log(Rs[good]), np.ones(int(np.sum(good)))], axis=1)
    sol, *_ = np.linalg.lstsq(A, np.log(errs[good]), rcond=None)
    return float(sol[0])


def r_sweep(
    kind: str,
    rep: QuiverRep,
    punctures,
    beta,
    Rs,
    v: TangentHP | None = None,
    cfg: ApproxMetricCfg = ApproxMetricCfg(),
    step: float = 1e-4,
):
    """Sweep a reported quantity over decreasing R values.

    Returns a dict with per-R rows (R, value, target, abs_err), the fitted
    log-log slope of the error, and the order-1 Richardson extrapolant from
    the two smallest R values.
    """
    Rs = list(Rs)
    if any(r2 >= r1 for r1, r2 in zip(Rs, Rs[1:])):
        raise ValueError("R values must be strictly decreasing")
    beta = beta_array(beta)
    rows = []
    for R in Rs:
        m = ApproxMetric(rep, punctures, beta, R, cfg)
        if kind == "morse":
            value = morse_integral(m)
            target = np.pi * float(np.sum(np.abs(rep.y) ** 2))
        elif kind == "metric":
            if v is None:
                raise ValueError("metric sweep requires a tangent")
            value = metric_pairing(m, v)
            target = TWO_PI * hp_norm_sq(v)
        elif kind == "residual":
            value = float(sum(disk_weighted_residual_sq(m)))
            target = 0.0
        elif kind == "gluegap":
            value = glue_gap_max(m)
            target = 0.0
        else:
            raise ValueError(f"unknown sweep kind {kind!r}")
        rows.append({"R": float(R), "value": float(value), "target": float(target),
                     "abs_err": abs(float(value) - float(target))})
    slope = _fit_slope([r["R"] for r in rows], [r["abs_err"] for r in rows])
    if kind in ("morse", "metric") and len(rows) >= 2:
        R1, R2 = rows[-2]["R"], rows[-1]["R"]
        v1_, v2_ = rows[-2]["value"], rows[-1]["value"]
        extrap = (R1 * v2_ - R2 * v1_) / (R1 - R2)
    else:
        extrap = rows[-1]["value"]
    return {"kind": kind, "rows": rows, "slope_fit": slope, "extrapolant": float(extrap)}
