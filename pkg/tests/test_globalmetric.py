import numpy as np
import pytest

from polyhiggs import globalmetric as gm
from polyhiggs import higgs, hp_tangent as ht, hyperpolygon as hp
from polyhiggs.errors import NotUnitary

BETA = hp.BetaWeights((0.55, 0.7, 0.85, 0.9))
TWO_PI = 2 * np.pi

FAST = gm.ApproxMetricCfg(n_radial=8, n_angular=32, ext_panels=12,
                          ext_angular=64, w_panels=6, w_angular=32,
                          u_points=64, panel_points=12)


@pytest.fixture(scope="module")
def unitary_rep():
    rng = np.random.default_rng(8)
    return hp.unitarize(hp.random_stable_hyperpolygon(4, BETA, rng), BETA)


@pytest.fixture(scope="module")
def metric(unitary_rep):
    R = 0.05 * higgs.r_max(BETA)
    return gm.ApproxMetric(unitary_rep, higgs.default_punctures(4),
                           hp.beta_array(BETA), R, FAST)


def test_bump_profile_properties():
    delta = 0.3
    r = np.linspace(1e-6, 2 * delta, 200)
    chi = gm.bump_profile(r, delta)
    assert np.all((0 <= chi) & (chi <= 1))
    assert gm.bump_profile(np.array([delta * 0.999]), delta)[0] == 1.0
    assert gm.bump_profile(np.array([2 * delta]), delta)[0] == 0.0
    # analytic derivative matches FD
    h = 1e-7
    mid = np.array([1.5 * delta])
    fd = (gm.bump_profile(mid + h, delta) - gm.bump_profile(mid - h, delta)) / (2 * h)
    assert gm.bump_profile_deriv(mid, delta)[0] == pytest.approx(fd[0], rel=1e-5)


def test_requires_unitary(rng):
    rep = hp.random_stable_hyperpolygon(4, BETA, rng)
    if not hp.is_unitary(rep, BETA):
        with pytest.raises(NotUnitary):
            gm.ApproxMetric(rep, higgs.default_punctures(4),
                            hp.beta_array(BETA), 0.01, FAST)


def test_h_app_positive_unimodular_factor(metric):
    zs = np.array([0.3 + 0.3j, 1.2 - 0.7j, 0.05j + metric.p[0]])
    E, Einv = metric.h_factor(zs)
    dets = E[..., 0, 0] * E[..., 1, 1] - E[..., 0, 1] * E[..., 1, 0]
    assert np.allclose(dets, 1.0, atol=1e-10)
    assert np.allclose(E @ Einv, np.eye(2), atol=1e-10)
    herm = np.max(np.abs(E - np.conj(np.swapaxes(E, -1, -2))))
    assert herm < 1e-10


def test_h_app_equals_local_inside_disk(metric):
    """Inside B_δ the glued metric is exactly the local model."""
    from polyhiggs import localmodel as lm

    i = 0
    p = metric.p[i]
    d = metric.local[i]
    for r in (metric.cfg.delta * 0.1, metric.cfg.delta * 0.9):
        z = p + r * np.exp(0.73j)
        E, _ = metric.h_factor(np.array([z]))
        lam = lm.lambda_loc(d, r)
        Ui = metric.U[i]
        expect = Ui.conj().T @ np.diag([lam, 1.0 / lam]) @ Ui
        scale = np.sqrt(np.real(np.linalg.det(expect)))
        assert np.allclose(E[0], expect / scale, atol=1e-12)


def test_residual_in_disk_matches_analytic(metric):
    """FD residual agrees with the closed in-disk expression."""
    p = metric.p[0]
    z = p + 0.5 * metric.cfg.delta * np.exp(0.3j)
    fd = gm.hitchin_residual_global(metric, z, 1e-4)
    analytic = gm._residual_in_disk(metric, 0, np.array([z]))[0]
    assert np.allclose(fd, analytic, atol=1e-5)


def test_residual_small_far_from_punctures(metric):
    res_far = np.linalg.norm(
        gm.hitchin_residual_global(metric, 2.5 + 1.7j, 1e-4))
    assert res_far < 1e-3


def test_morse_integral_near_target(metric, unitary_rep):
    got = gm.morse_integral(metric)
    target = np.pi * np.sum(np.abs(unitary_rep.y) ** 2)
    assert got == pytest.approx(target, rel=0.1)


def test_metric_pairing_near_target(metric, unitary_rep):
    rng = np.random.default_rng(3)
    v = ht.random_unitary_lift(unitary_rep, rng, BETA)
    got = gm.metric_pairing(metric, v)
    assert got == pytest.approx(TWO_PI * ht.hp_norm_sq(v), rel=0.1)


def test_metric_pairing_polarization(metric, unitary_rep):
    rng = np.random.default_rng(4)
    v1 = ht.random_unitary_lift(unitary_rep, rng, BETA)
    v2 = ht.random_unitary_lift(unitary_rep, rng, BETA)
    g12 = (gm.metric_pairing(metric, v1 + v2)
           - gm.metric_pairing(metric, v1 - v2)) / 4.0
    # compare against the same polarization of the flat target
    flat = (ht.hp_norm_sq(v1 + v2) - ht.hp_norm_sq(v1 - v2)) / 4.0
    assert g12 == pytest.approx(TWO_PI * flat, rel=0.1, abs=0.5)


def test_symplectic_antisymmetry_and_value(metric, unitary_rep):
    rng = np.random.default_rng(5)
    v1 = ht.random_unitary_lift(unitary_rep, rng, BETA)
    v2 = ht.random_unitary_lift(unitary_rep, rng, BETA)
    a = gm.symplectic_pullback(metric, v1, v2)
    b = gm.symplectic_pullback(metric, v2, v1)
    assert a == pytest.approx(-b, rel=1e-10, abs=1e-12)
    target = TWO_PI * np.real(ht.hp_symplectic(v1, v2))
    assert a == pytest.approx(target, rel=2e-2, abs=1e-8)


def test_glue_gap_max_positive_and_small(metric):
    gap = gm.glue_gap_max(metric)
    assert 0 < gap < 0.1


def test_r_sweep_requires_decreasing():
    with pytest.raises(ValueError):
        gm.r_sweep("morse", None, None, hp.beta_array(BETA), [0.01, 0.02])


def test_r_sweep_morse_rows(unitary_rep):
    rmax = higgs.r_max(BETA)
    out = gm.r_sweep("morse", unitary_rep, higgs.default_punctures(4),
                     hp.beta_array(BETA), [0.1 * rmax, 0.05 * rmax], cfg=FAST)
    assert out["kind"] == "morse"
    assert len(out["rows"]) == 2
    target = np.pi * np.sum(np.abs(unitary_rep.y) ** 2)
    for row in out["rows"]:
        assert row["target"] == pytest.approx(target)
        assert row["abs_err"] == abs(row["value"] - row["target"])
    # errors shrink with R
    assert out["rows"][1]["abs_err"] < out["rows"][0]["abs_err"]
