import numpy as np
import pytest

from polyhiggs import gibbons_hawking as gh
from polyhiggs.errors import AtCenter

FOUR_PI = 4 * np.pi


@pytest.fixture
def three_centers(rng):
    return gh.GHData(R=1.3, centers=rng.normal(size=(3, 3)))


def test_single_center_value():
    g = gh.GHData(R=0.0, centers=np.zeros((1, 3)))
    assert gh.potential(g, [1.0, 0.0, 0.0]) == pytest.approx(1.0 / FOUR_PI)


def test_at_center_raises():
    g = gh.GHData(R=0.0, centers=np.zeros((1, 3)))
    with pytest.raises(AtCenter):
        gh.potential(g, [0.0, 0.0, 0.0])


def test_duplicate_centers_rejected():
    with pytest.raises(ValueError):
        gh.GHData(R=0.0, centers=np.zeros((2, 3)))


def test_negative_R_rejected():
    with pytest.raises(ValueError):
        gh.GHData(R=-1.0, centers=np.zeros((1, 3)))


def test_translation_equivariance(rng, three_centers):
    a = rng.normal(size=3)
    x = rng.normal(size=3) * 2
    g2 = gh.GHData(R=three_centers.R, centers=three_centers.centers + a)
    assert gh.potential(g2, x + a) == pytest.approx(
        gh.potential(three_centers, x))


def test_R_shift_exact(rng, three_centers):
    g2 = gh.GHData(R=0.2, centers=three_centers.centers)
    x = rng.normal(size=3) * 2
    assert gh.potential(three_centers, x) - gh.potential(g2, x) == \
        pytest.approx(1.3 - 0.2, abs=1e-14)


def test_metric_coeffs_product_one(rng, three_centers):
    x = rng.normal(size=3) * 2
    V, Vinv = gh.metric_coeffs(three_centers, x)
    assert V * Vinv == pytest.approx(1.0, abs=1e-14)


def test_alf_fiber_limit():
    g = gh.GHData(R=2.0, centers=np.zeros((1, 3)))
    _, Vinv = gh.metric_coeffs(g, [1e8, 0.0, 0.0])
    assert Vinv == pytest.approx(0.5, rel=1e-7)


def test_ale_fiber_growth():
    n = 3
    centers = np.array([[0.0, 0.0, k] for k in range(n)], dtype=float)
    g = gh.GHData(R=0.0, centers=centers)
    s = 1e7
    _, Vinv = gh.metric_coeffs(g, [s, 0.0, 0.0])
    assert Vinv == pytest.approx(FOUR_PI * s / n, rel=1e-5)


def _far_point(rng, g, min_dist=1.0):
    while True:
        x = rng.normal(size=3) * 2
        if np.min(np.linalg.norm(x - g.centers, axis=1)) > min_dist:
            return x


def test_harmonicity_residual_small(rng, three_centers):
    for _ in range(5):
        x = _far_point(rng, three_centers)
        assert gh.harmonicity_residual(three_centers, x, 1e-3) < 1e-6


def test_harmonicity_order_two(three_centers):
    x = np.array([2.0, 0.3, -0.4])
    r1 = gh.harmonicity_residual(three_centers, x, 1e-2)
    r2 = gh.harmonicity_residual(three_centers, x, 2e-2)
    assert r2 / r1 == pytest.approx(4.0, rel=0.2)


def test_grad_potential_fd(rng, three_centers):
    x = rng.normal(size=3) * 2
    grad = gh.grad_potential(three_centers, x)
    h = 1e-6
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        fd = (gh.potential(three_centers, x + e)
              - gh.potential(three_centers, x - e)) / (2 * h)
        assert grad[k] == pytest.approx(fd, rel=1e-6, abs=1e-10)


def test_curvature_R_independent(rng, three_centers):
    g2 = gh.GHData(R=0.01, centers=three_centers.centers)
    x = rng.normal(size=3) * 2
    assert np.array_equal(gh.curvature_two_form(three_centers, x),
                          gh.curvature_two_form(g2, x))


def test_curvature_closed(rng, three_centers):
    for _ in range(5):
        x = _far_point(rng, three_centers)
        assert gh.curl_residual(three_centers, x, 1e-3) < 1e-6


def test_flux_gauss_oracle(three_centers):
    """Flux through a small sphere around each center has magnitude 2π."""
    for i in range(3):
        f = gh.sphere_flux(three_centers, i, 0.05)
        assert abs(f) == pytest.approx(2 * np.pi, rel=1e-3)


def test_flux_counts_enclosed_charge():
    centers = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.3]])
    g = gh.GHData(R=0.5, centers=centers)
    # a radius-1 sphere around the first center encloses both
    f = gh.sphere_flux(g, 0, 1.0, n_theta=96, n_phi=192)
    assert abs(f) == pytest.approx(2 * (2 * np.pi), rel=1e-3)
