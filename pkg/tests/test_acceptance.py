"""End-to-end acceptance gate: one test per headline guarantee.

Each test freezes its random seed so repeated runs are byte-reproducible,
and each finishes well under two minutes on commodity hardware.
"""

import numpy as np
import pytest

from polyhiggs import (
    cli,
    gibbons_hawking as gh,
    globalmetric as gm,
    higgs,
    hp_tangent as ht,
    hyperpolygon as hp,
    localmodel as lm,
)
from polyhiggs.errors import WallWeights

from conftest import DATA, generic_beta
from test_hyperpolygon import stable_bruteforce

TWO_PI = 2 * np.pi
BETA = hp.BetaWeights((0.55, 0.7, 0.85, 0.9))
RMAX = higgs.r_max(BETA)
PUNCTURES = higgs.default_punctures(4)
EXAMPLE = DATA / "example_n4.json"


# 1 ------------------------------------------------------------------------
def test_01_stability_oracle_equivalence():
    rng = np.random.default_rng(101)
    for n in (4, 5, 6, 7):
        beta = generic_beta(rng, n)
        bw = hp.BetaWeights(tuple(beta))
        checked = 0
        while checked < 500:
            rep = hp.random_hyperpolygon(n, rng)
            try:
                got = hp.is_stable(rep, bw)
            except WallWeights:
                continue
            assert got == stable_bruteforce(rep, beta)
            checked += 1


# 2 ------------------------------------------------------------------------
def test_02_unitarization_accuracy_and_gauge_agreement():
    import scipy.linalg

    rng = np.random.default_rng(102)
    for _ in range(100):
        rep = hp.random_stable_hyperpolygon(4, BETA, rng)
        u = hp.unitarize(rep, BETA)
        assert hp.moment_residual(u, BETA) < 1e-10
        m, s = hp.mu_complex(u)
        assert np.linalg.norm(m) + np.max(np.abs(s)) < 1e-10
        # gauge translate, re-unitarize, compare invariants
        H = sum(c * s_ for c, s_ in zip(0.3 * rng.normal(size=3), hp.mat2.SIGMA))
        g = hp.GroupElt(scipy.linalg.expm(H.astype(complex)),
                        np.exp(0.3 * rng.normal(size=4)).astype(complex))
        u2 = hp.unitarize(hp.act(g, rep), BETA)
        inv1 = hp.gauge_invariants(u)
        inv2 = hp.gauge_invariants(u2)
        scale = max(1.0, np.max(np.abs(inv1)))
        assert np.max(np.abs(inv1 - inv2)) < 1e-8 * scale


# 3 ------------------------------------------------------------------------
def _local_grid():
    return [
        r * np.exp(1j * th)
        for r in np.linspace(0.1, 0.9, 10)
        for th in np.linspace(0, TWO_PI, 10, endpoint=False)
    ]


def test_03_local_model_exactness():
    rng = np.random.default_rng(103)
    for R in (1.0, 0.1, 0.01):
        for _ in range(20):
            d = lm.random_local_data(rng, R=R)
            for z in _local_grid():
                assert lm.hitchin_residual_local(d, z, 1e-3) < 1e-5
    # order-2 step convergence
    d = lm.random_local_data(rng, R=1.0)
    z = 0.85 + 0.2j
    r1 = lm.hitchin_residual_local(d, z, 1e-3)
    r2 = lm.hitchin_residual_local(d, z, 2e-3)
    assert r2 / r1 == pytest.approx(4.0, rel=0.3)


# 4 ------------------------------------------------------------------------
def test_04_coulomb_gauge_exactness():
    rng = np.random.default_rng(104)
    for R in (1.0, 0.1, 0.01):
        for _ in range(20):
            d = lm.random_local_data(rng, R=R)
            t = lm.random_local_tangent(d, rng)
            for z in _local_grid():
                assert lm.coulomb_residual_local(d, t, z, 1e-3) < 1e-4


# 5 ------------------------------------------------------------------------
def test_05_disk_curvature_integral_lemma():
    rng = np.random.default_rng(105)
    # quadrature vs closed form
    for _ in range(10):
        d = lm.random_local_data(rng, R=rng.uniform(0.01, 0.5))
        closed = lm.disk_curvature_closed(d, 0.5)
        quad = lm.disk_curvature_quad(d, 0.5)
        assert abs(quad - closed) < 1e-6 * max(1.0, abs(closed))
    # canonical example: |y|² = 1, β = 1/2, δ = 1/2
    x = np.array([np.sqrt(2.0), 0.0])
    y = np.array([0.0, 1.0])
    target = TWO_PI  # 2π|y|²
    errs = []
    for R in (0.02, 0.01, 0.005):
        d = lm.LocalData(x=x, y=y, beta=0.5, R=R)
        errs.append(abs(lm.disk_curvature_closed(d, 0.5) - target))
    # empirical O(R) rate
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.3)
    assert errs[1] / errs[2] == pytest.approx(2.0, rel=0.3)
    d = lm.LocalData(x=x, y=y, beta=0.5, R=1e-3)
    assert abs(lm.disk_curvature_closed(d, 0.5) - target) < 0.01 * target


# 6 ------------------------------------------------------------------------
def test_06_local_pairing_identity():
    rng = np.random.default_rng(106)
    for _ in range(100):
        d = lm.random_local_data(rng, R=rng.uniform(0.01, 0.5))
        t = lm.random_local_tangent(d, rng)
        total = lm.boundary_pairing(d, t) + lm.bulk_pairing(d, t, 1.0)[0]
        expect = TWO_PI * (np.sum(np.abs(t.xdot) ** 2)
                           + np.sum(np.abs(t.ydot) ** 2))
        assert abs(total - expect) < 1e-12 * max(1.0, expect)
    # worked example: boundary π, bulk 2π, total 3π
    d = lm.LocalData(x=np.array([np.sqrt(2.0), 0.0]),
                     y=np.array([0.0, 1.0]), beta=0.5, R=0.01)
    t = lm.LocalTangent(xdot=np.array([0.0, 1.0]),
                        ydot=np.array([-1.0 / np.sqrt(2.0), 0.0]))
    assert lm.boundary_pairing(d, t) == pytest.approx(np.pi, abs=1e-12)
    assert lm.bulk_pairing(d, t, 1.0)[0] == pytest.approx(2 * np.pi, abs=1e-12)


# ---------------------------------------------------------------------------
# Shared shipped-example fixtures for the glued-metric criteria
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def shipped():
    rep, beta = hp.load_json(EXAMPLE)
    return rep, hp.BetaWeights(tuple(beta))


# 7 ------------------------------------------------------------------------
def test_07_glue_gap_rate(shipped):
    rep, beta = shipped
    Rs = [f * RMAX for f in (0.1, 0.0464, 0.0215, 0.01)]  # one decade
    out = gm.r_sweep("gluegap", rep, PUNCTURES, hp.beta_array(beta), Rs)
    assert 1.9 <= out["slope_fit"] <= 2.1


# 8 ------------------------------------------------------------------------
def test_08_weighted_residual_rate(shipped):
    rep, beta = shipped
    Rs = [f * RMAX for f in (0.1, 0.05, 0.02, 0.01)]
    out = gm.r_sweep("residual", rep, PUNCTURES, hp.beta_array(beta), Rs)
    assert out["slope_fit"] >= 2.8


# 9 ------------------------------------------------------------------------
def test_09_fixed_point_morse_identity():
    rng = np.random.default_rng(109)
    betas = [np.array([1.0, 1.0, 1.0, 2.0])]
    while len(betas) < 11:
        b = generic_beta(rng, 4)
        betas.append(b)
    for b in betas:
        bw = hp.BetaWeights(tuple(b))
        rmax = higgs.r_max(b)
        shorts = higgs.short_subsets(b)
        assert shorts
        for R in np.linspace(0.05, 0.95, 20) * rmax:
            alpha = higgs.alpha_of(bw, R)
            for I in shorts:
                rep = higgs.fixed_point_rep(I, bw, rng=rng)
                m_hp = higgs.morse_hp(rep, bw)
                m_hit = higgs.morse_hitchin_fixed(I, 0, alpha)
                assert abs(m_hit - TWO_PI * m_hp) < 1e-12 * max(1.0, abs(m_hit))


# 10 / 11 -------------------------------------------------------------------
RS_EXTRAP = [0.1 * RMAX, 0.05 * RMAX, 0.025 * RMAX]


@pytest.fixture(scope="module")
def random_unitary_reps():
    rng = np.random.default_rng(2026)
    reps = []
    for _ in range(5):
        rep = hp.unitarize(
            hp.random_stable_hyperpolygon(4, BETA, rng, y_scale=0.25), BETA)
        lifts = [ht.random_unitary_lift(rep, rng, BETA) for _ in range(3)]
        reps.append((rep, lifts))
    return reps


def test_10_morse_convergence(random_unitary_reps):
    for rep, _ in random_unitary_reps:
        out = gm.r_sweep("morse", rep, PUNCTURES, hp.beta_array(BETA),
                         RS_EXTRAP)
        target = np.pi * np.sum(np.abs(rep.y) ** 2)
        assert abs(out["extrapolant"] - target) < 0.01 * target


def test_11_metric_degeneration(random_unitary_reps):
    for rep, lifts in random_unitary_reps:
        for v in lifts:
            out = gm.r_sweep("metric", rep, PUNCTURES, hp.beta_array(BETA),
                             RS_EXTRAP, v=v)
            target = TWO_PI * ht.hp_norm_sq(v)
            assert abs(out["extrapolant"] - target) < 0.02 * target


def test_11b_metric_polarization_at_fixed_R(random_unitary_reps):
    rep, lifts = random_unitary_reps[0]
    v1, v2 = lifts[0], lifts[1]
    m = gm.ApproxMetric(rep, PUNCTURES, hp.beta_array(BETA), 0.05 * RMAX)
    # parallelogram law of the quadratic form, within quadrature tolerance
    lhs = gm.metric_pairing(m, v1 + v2) + gm.metric_pairing(m, v1 - v2)
    rhs = 2.0 * gm.metric_pairing(m, v1) + 2.0 * gm.metric_pairing(m, v2)
    assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-8)


# 12 ------------------------------------------------------------------------
def test_12_symplectic_pullback(random_unitary_reps):
    rep, lifts = random_unitary_reps[0]
    v1, v2 = lifts[0], lifts[1]
    target = TWO_PI * np.real(ht.hp_symplectic(v1, v2))
    vals = []
    for R in RS_EXTRAP[1:]:
        m = gm.ApproxMetric(rep, PUNCTURES, hp.beta_array(BETA), R)
        a = gm.symplectic_pullback(m, v1, v2)
        b = gm.symplectic_pullback(m, v2, v1)
        assert a == pytest.approx(-b, rel=1e-10, abs=1e-12)
        vals.append(a)
    R1, R2 = RS_EXTRAP[1:]
    extrap = (R1 * vals[1] - R2 * vals[0]) / (R1 - R2)
    assert abs(extrap - target) < 0.02 * max(abs(target), 1e-8)


# 13 ------------------------------------------------------------------------
def test_13_torelli_table():
    for R in (0.05, 0.1, 0.2):
        for row in higgs.torelli_table(BETA, R):
            assert row["ratio"] == pytest.approx(TWO_PI, abs=1e-12)
            assert row["tau_j2"] == 0.0
            assert row["tau_j3"] == 0.0


# 14 ------------------------------------------------------------------------
def test_14_gibbons_hawking():
    rng = np.random.default_rng(114)
    g = gh.GHData(R=1.0, centers=2.0 * rng.normal(size=(3, 3)))
    for _ in range(10):
        x = rng.normal(size=3) * 4
        if np.min(np.linalg.norm(x - g.centers, axis=1)) < 1.0:
            continue
        assert gh.harmonicity_residual(g, x, 1e-3) < 1e-6
    for i in range(3):
        assert abs(gh.sphere_flux(g, i, 0.05)) == pytest.approx(
            TWO_PI, rel=1e-3)
    g2 = gh.GHData(R=0.01, centers=g.centers)
    x = np.array([3.0, 1.0, -2.0])
    F1 = gh.curvature_two_form(g, x)
    F2 = gh.curvature_two_form(g2, x)
    assert np.max(np.abs(F1 - F2)) < 1e-14


# 15 ------------------------------------------------------------------------
def test_15_reproducibility_bytes(tmp_path):
    pairs = []
    for tag in ("a", "b"):
        mp = tmp_path / f"map_{tag}.json"
        sw = tmp_path / f"sweep_{tag}.csv"
        assert cli.main(["map", str(EXAMPLE), "--out", str(mp)]) == 0
        assert cli.main(["sweep", "gluegap", str(EXAMPLE), "--seed", "7",
                        "--R", "0.02", "--R", "0.01", "--out", str(sw)]) == 0
        pairs.append((mp.read_bytes(), sw.read_bytes()))
    assert pairs[0] == pairs[1]
