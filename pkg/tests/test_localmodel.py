import numpy as np
import pytest

from polyhiggs import localmodel as lm

TWO_PI = 2 * np.pi


@pytest.fixture
def data(rng):
    return lm.random_local_data(rng, beta=0.5, R=0.1)


@pytest.fixture
def tangent(data, rng):
    return lm.random_local_tangent(data, rng)


def test_random_data_admissible(rng):
    for _ in range(10):
        d = lm.random_local_data(rng, beta=rng.uniform(0.2, 1.0),
                                 R=rng.uniform(0.01, 1.0))
        assert d.a > d.b >= 0
        assert lm.lambda_loc(d, 0.5) > 0


def test_tangent_conditions(data, rng):
    for _ in range(10):
        t = lm.random_local_tangent(data, rng)
        assert lm.check_local_tangent(data, t)


def test_lambda_normalization(data):
    # λ(1) = 2β/(a − b) = 1 by the defining constraint a − b = 2β
    assert lm.lambda_loc(data, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_u_substitution_roundtrip(data):
    for r in (1e-6, 0.3, 0.9):
        assert data.r_of_u(data.u(r)) == pytest.approx(r, rel=1e-12)


def test_aligned_frame_unitary(data):
    U = lm.aligned_frame(data.x)
    assert np.allclose(U @ U.conj().T, np.eye(2), atol=1e-13)


def test_hitchin_residual_small_and_order2(data):
    z = 0.4 + 0.2j
    r1 = lm.hitchin_residual_local(data, z, 1e-3)
    r2 = lm.hitchin_residual_local(data, z, 2e-3)
    assert r1 < 1e-5
    assert r2 / r1 == pytest.approx(4.0, rel=0.3)


def test_coulomb_residual_small(data, tangent):
    assert lm.coulomb_residual_local(data, tangent, 0.5 + 0.1j, 1e-3) < 1e-4


def test_metric_variation_second_order(data, tangent):
    e1 = lm.metric_variation_check(data, tangent, 1e-3)
    e2 = lm.metric_variation_check(data, tangent, 2e-3)
    assert e2 / e1 == pytest.approx(4.0, rel=0.5)


def test_glue_gap_vanishes_like_r_squared(data):
    gaps = []
    for R in (0.1, 0.05, 0.025):
        d = lm.LocalData(x=data.x, y=data.y, beta=data.beta, R=R)
        gaps.append(max(lm.glue_gap(d, 0.25)))
    assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.4)
    assert gaps[1] / gaps[2] == pytest.approx(4.0, rel=0.4)


def test_disk_curvature_quad_matches_closed(data):
    closed = lm.disk_curvature_closed(data, 0.5)
    quad = lm.disk_curvature_quad(data, 0.5)
    assert quad == pytest.approx(closed, rel=1e-5, abs=1e-8)


def test_disk_curvature_limit_canonical():
    # |y|² = 1, β = 1/2, δ = 1/2: the R → 0 limit is 2π|y|²
    y_sq = 1.0
    closed_vals = []
    for R in (0.02, 0.01, 0.005, 1e-3):
        d = lm.LocalData(x=np.array([np.sqrt(2.0), 0]), y=np.array([0, 1.0]),
                         beta=0.5, R=R)
        closed_vals.append(lm.disk_curvature_closed(d, 0.5))
    target = TWO_PI * y_sq
    errs = [abs(v - target) for v in closed_vals]
    # empirical O(R) rate
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.3)
    assert errs[2] / errs[3] == pytest.approx(5.0, rel=0.5)
    assert errs[3] < 0.01 * target


def test_boundary_pairing_formula(data, tangent):
    _, xd2, yd1, _ = lm.aligned_tangent(data, tangent)
    expect = TWO_PI * (abs(xd2) ** 2 - abs(yd1) ** 2)
    assert lm.boundary_pairing(data, tangent) == pytest.approx(expect)


def test_bulk_pairing_quad_matches_closed(data, tangent):
    closed, quad = lm.bulk_pairing(data, tangent, 1.0)
    assert quad == pytest.approx(closed, rel=5e-3)


def test_pairing_identity_worked_example():
    d = lm.LocalData(x=np.array([np.sqrt(2.0), 0]), y=np.array([0, 1.0]),
                     beta=0.5, R=0.01)
    t = lm.LocalTangent(xdot=np.array([0.0, 1.0]),
                        ydot=np.array([-1.0 / np.sqrt(2.0), 0.0]))
    assert lm.check_local_tangent(d, t)
    boundary = lm.boundary_pairing(d, t)
    bulk_closed, _ = lm.bulk_pairing(d, t, 1.0)
    assert boundary == pytest.approx(np.pi, abs=1e-12)
    assert bulk_closed == pytest.approx(2 * np.pi, abs=1e-12)
    assert boundary + bulk_closed == pytest.approx(3 * np.pi, abs=1e-12)


def test_pairing_identity_random(rng):
    for _ in range(20):
        d = lm.random_local_data(rng, beta=rng.uniform(0.2, 1.0),
                                 R=rng.uniform(0.01, 0.3))
        t = lm.random_local_tangent(d, rng)
        total = lm.boundary_pairing(d, t) + lm.bulk_pairing(d, t, 1.0)[0]
        expect = TWO_PI * (np.sum(np.abs(t.xdot) ** 2)
                           + np.sum(np.abs(t.ydot) ** 2))
        assert total == pytest.approx(expect, abs=1e-12 * max(1.0, expect))


def test_dbar_nu_is_fd_derivative(data, tangent):
    z = 0.3 + 0.4j
    h = 1e-6
    fd = ((lm.nu_loc(data, tangent, z + h) - lm.nu_loc(data, tangent, z - h))
          / (2 * h)
          + 1j * (lm.nu_loc(data, tangent, z + 1j * h)
                  - lm.nu_loc(data, tangent, z - 1j * h)) / (2 * h)) / 2.0
    assert np.allclose(fd, lm.dbar_nu_loc(data, tangent, z), atol=1e-6)
