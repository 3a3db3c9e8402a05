"""Multi-center Gibbons–Hawking data on ℝ³ and its R → 0 degeneration.

The potential V_R(x) = R + Σ 1/(4π|x − p_i|) defines a hyperkähler
4-metric V‖dx‖² + V⁻¹Θ² whose curvature 2-form F = −2π⋆dV is independent
of the constant R.  As R → 0 the bounded-fiber (ALF) geometry degenerates
to the unbounded-fiber (ALE) one; only the fiber coefficient V⁻¹ changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import AtCenter

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class GHData:
    """Distinct monopole centers in ℝ³ and the constant term R ≥ 0."""

    R: float
    centers: NDArray[np.float64]

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "centers", c)
        if self.R < 0:
            raise ValueError("R must be nonnegative")
        n = len(c)
        for i in range(n):
            for j in range(i + 1, n):
                if np.linalg.norm(c[i] - c[j]) == 0:
                    raise ValueError("centers must be pairwise distinct")


def _dists(g: GHData, x) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=float)
    d = np.linalg.norm(x - g.centers, axis=-1)
    if np.any(d == 0):
        raise AtCenter("potential evaluated at a monopole center")
    return d


def potential(g: GHData, x) -> float:
    """Harmonic potential R + Σ 1/(4π|x − p_i|)."""
    return float(g.R + np.sum(1.0 / (FOUR_PI * _dists(g, x))))


def metric_coeffs(g: GHData, x):
    """(V, V⁻¹): the base and fiber coefficients of the 4-metric."""
    V = potential(g, x)
    if V <= 0:
        raise ValueError("potential must be positive")
    return V, 1.0 / V


def harmonicity_residual(g: GHData, x, step: float) -> float:
    """|FD Laplacian of V| at x; O(step²) since V is harmonic."""
    x = np.asarray(x, dtype=float)
    lap = -6.0 * potential(g, x)
    for k in range(3):
        e = np.zeros(3)
        e[k] = step
        lap += potential(g, x + e) + potential(g, x - e)
    return abs(lap / step**2)


def grad_potential(g: GHData, x) -> NDArray[np.float64]:
    """∇V, closed form: Σ −(x − p_i)/(4π|x − p_i|³)."""
    x = np.asarray(x, dtype=float)
    diff = x - g.centers
    d = _dists(g, x)
    return -np.sum(diff / (FOUR_PI * d**3)[:, None], axis=0)


def curvature_two_form(g: GHData, x) -> NDArray[np.float64]:
    """Components (F₂₃, F₃₁, F₁₂) of F = −2π ⋆ dV.

    With the Euclidean star, ⋆dV = ∂₁V dx²∧dx³ + ∂₂V dx³∧dx¹ +
    ∂₃V dx¹∧dx²; the returned vector is −2π ∇V.  Independent of R.
    """
    return -2.0 * np.pi * grad_potential(g, x)


def curl_residual(g: GHData, x, step: float) -> float:
    """|dF| at x by FD: the scalar coefficient of the closedness defect.

    dF = (div of the vector proxy) dx¹∧dx²∧dx³; vanishes because V is
    harmonic away from the centers.
    """
    x = np.asarray(x, dtype=float)
    div = 0.0
    for k in range(3):
        e = np.zeros(3)
        e[k] = step
        div += (curvature_two_form(g, x + e)[k] - curvature_two_form(g, x - e)[k]) / (
            2.0 * step
        )
    return abs(div)


def sphere_flux(g: GHData, center_index: int, radius: float, n_theta: int = 64,
                n_phi: int = 128) -> float:
    """Flux ∮ F through the sphere of given radius around one center.

    Gauss–Legendre in cos θ × uniform φ; equals ±2π per unit center charge.
    """
    c = g.centers[center_index]
    mu, wmu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    total = 0.0
    for m, w in zip(mu, wmu):
        st = np.sqrt(1.0 - m * m)
        for ph in phi:
            normal = np.array([st * np.cos(ph), st * np.sin(ph), m])
            x = c + radius * normal
            F = curvature_two_form(g, x)
            total += w * (2.0 * np.pi / n_phi) * radius**2 * float(F @ normal)
    return float(total)
