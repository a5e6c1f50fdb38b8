import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from fpplab.estimators import (
    ScalarEstimate,
    coexistence_curve,
    estimate_mu,
    estimate_mu_laws,
    estimate_nu,
    fluctuation_diagnostics,
    interface_census,
    max_forward_angle,
    path_census,
    path_straightness,
    straightness_census,
    tail_profile,
)
from fpplab.fpp import EdgeWeights, PassageTimeLaw
from fpplab.geometry import SimWindow
from fpplab.replicate import Configuration, make_configuration
from fpplab.stats import mean_interval, wilson_interval

EXP = PassageTimeLaw.exponential()


# ----------------------------------------------------------------- intervals


@given(st.integers(1, 400), st.data())
def test_wilson_matches_scipy(n, data):
    k = data.draw(st.integers(0, n))
    ci = stats.binomtest(k, n).proportion_ci(0.95, method="wilson")
    lo, hi = wilson_interval(k, n)
    assert lo == pytest.approx(ci.low, abs=1e-12)
    assert hi == pytest.approx(ci.high, abs=1e-12)


def test_wilson_shrinks_with_replicates():
    w50 = np.subtract(*wilson_interval(40, 50)[::-1])
    w200 = np.subtract(*wilson_interval(160, 200)[::-1])
    assert w200 < w50
    assert wilson_interval(200, 200)[1] == 1.0


def test_mean_interval_matches_scipy():
    x = np.random.default_rng(3).normal(2.0, 1.5, 37)
    m, se, lo, hi = mean_interval(x)
    ref = stats.t.interval(0.95, len(x) - 1, loc=x.mean(), scale=stats.sem(x))
    assert (lo, hi) == pytest.approx(ref, abs=1e-12)
    assert se == pytest.approx(stats.sem(x), abs=1e-15)
    assert np.isnan(mean_interval([1.0])[1])


# ----------------------------------------------------------------- time constants


@pytest.fixture(scope="module")
def mu_pair():
    return estimate_mu_laws([EXP, EXP.scaled(2.0)], 15.0, replicates=6, master_seed=3)


def test_mu_shape_of_estimate(mu_pair):
    e = mu_pair[0]
    assert e.samples.shape == (6, 8) and len(e.per_angle) == 8
    assert e.stderr >= 0 and e.replicates == 6
    assert e.ci[0] <= e.value <= e.ci[1]
    assert 0 < e.value < 1
    d = e.to_dict()
    assert d["method"]["r"] == 15.0 and len(d["per_angle"]) == 8


def test_mu_scales_exactly_per_replicate(mu_pair):
    a, b = mu_pair
    assert np.array_equal(b.samples, 2.0 * a.samples)
    assert b.value == pytest.approx(2 * a.value, rel=1e-12)


def test_mu_is_deterministic(mu_pair):
    again = estimate_mu(EXP, 15.0, replicates=6, master_seed=3)
    assert np.array_equal(again.samples, mu_pair[0].samples)


def test_mu_radius_must_fit():
    with pytest.raises(ValueError, match="inner half-width"):
        estimate_mu(EXP, 30.0, replicates=1, window=SimWindow(30.0))


def test_isotropy_violation_finder():
    e = ScalarEstimate("mu", 1.0, 0.1, 10, {}, per_angle={0.0: (1.0, 0.1), 1.0: (1.05, 0.1), 2.0: (2.0, 0.1)})
    assert e.isotropy_violations() == [(0.0, 2.0), (1.0, 2.0)]


def test_nu_bounds_mu():
    nu = estimate_nu([10.0, 20.0], replicates=6, master_seed=3)
    mu = estimate_mu(EXP, 20.0, replicates=6, master_seed=3, window=SimWindow(30.0))
    assert set(nu.method["by_radius"]) == {"10.0", "20.0"}
    # hop counts are integers over r
    assert np.allclose(nu.samples * 20.0, np.round(nu.samples * 20.0))
    assert mu.value <= EXP.mean * nu.value
    assert not nu.isotropy_violations()


def test_nu_ignores_the_law():
    # geometry stream is law-independent and hop counts never see weights
    a = estimate_nu([10.0], replicates=3, master_seed=8)
    b = estimate_nu([10.0], replicates=3, master_seed=8)
    assert np.array_equal(a.samples, b.samples)
    cfg_a = make_configuration(SimWindow(15.0), 1.0, EXP, 8, 0)
    cfg_b = make_configuration(SimWindow(15.0), 1.0, PassageTimeLaw.uniform(1, 2), 8, 0)
    assert np.array_equal(cfg_a.delaunay.edges, cfg_b.delaunay.edges)


# ----------------------------------------------------------------- fluctuations


def test_constant_weights_have_no_spread():
    def unit(rep):
        cfg = make_configuration(SimWindow(45.0), 1.0, EXP, 0, 0)
        return Configuration(cfg.points, cfg.delaunay, EdgeWeights(np.ones(cfg.delaunay.n_edges)), rep)

    c = fluctuation_diagnostics(EXP, [10.0, 20.0, 30.0], replicates=4, configure=unit, window=SimWindow(45.0))
    assert np.all(c.y == 0)
    assert np.isnan(c.extra["growth_exponent"])


def test_spread_grows_and_residual_settles():
    c = fluctuation_diagnostics(EXP, [20.0, 40.0, 80.0], replicates=20, master_seed=6, window=SimWindow(100.0))
    assert c.y[0] < c.y[-1]
    lo, hi = c.extra["residual_ci"][-1]
    assert lo <= 0 <= hi
    rel = np.abs(c.extra["residual_mean"]) / c.x
    assert rel[-1] <= rel[0]


# ----------------------------------------------------------------- coexistence


def test_single_species_always_coexists():
    c = coexistence_curve(1, [2.0, 8.0], replicates=3, window=SimWindow(30.0))
    assert c.y.tolist() == [1.0, 1.0]
    assert c.extra["coverage"] == [1.0, 1.0]


def test_coverage_never_exceeds_coexistence():
    c = coexistence_curve(3, [3.0, 6.0, 12.0], replicates=8, window=SimWindow(30.0), master_seed=2)
    raw = np.array(c.extra["raw"])
    assert raw.shape == (8, 3, 2)
    assert np.all(~raw[:, :, 1] | raw[:, :, 0])
    assert np.all(np.array(c.extra["coverage"]) <= c.y)
    assert np.all((c.lo <= c.y) & (c.y <= c.hi))
    assert np.all((0 <= c.lo) & (c.hi <= 1))
    assert len(c.rows()) == 3


# ----------------------------------------------------------------- straightness


def test_straight_path_has_zero_angles():
    s = np.linspace(1, 50, 60)
    pts = s[:, None] * np.array([np.cos(0.7), np.sin(0.7)])
    assert np.all(max_forward_angle(pts) <= 1e-12)
    ex, rad, a = path_straightness(pts, 5.0)
    assert np.isnan(ex) and len(a) == 0


def test_wobbly_path_exponent():
    s = np.linspace(2, 80, 400)
    phi = 0.3 + 0.4 * s**-0.5 * np.cos(s)
    pts = s[:, None] * np.column_stack([np.cos(phi), np.sin(phi)])
    ex, _, _ = path_straightness(pts, 10.0)
    assert ex < 0


def test_straightness_census_small():
    c = straightness_census(2, window=SimWindow(40.0), paths_per_replicate=4, master_seed=1)
    assert 0 < c.extra["n_paths"] <= 8
    assert 0 <= c.extra["negative_fraction"] <= 1
    assert np.all(np.diff(c.y) >= 0)


def test_interface_census_small():
    res = interface_census(2, window=SimWindow(40.0), master_seed=1, rotate=True)
    assert res["partition_ok"] == [True, True]
    for rot in res["rotation"]:
        assert rot["structure_identical"] and rot["max_theta_error"] <= 1e-12
    for row in res["branches"]:
        assert 0 <= row["theta"] < 2 * np.pi


# ----------------------------------------------------------------- census tails


def test_tail_profile_of_exponential():
    x = np.random.default_rng(0).exponential(0.5, 20000)
    t = tail_profile(x)
    assert np.all(np.diff(t["freq"]) <= 0)
    assert t["log_slope"] == pytest.approx(-2.0, rel=0.15)


def test_path_census_small():
    res = path_census((5.0, 10.0), replicates=3, master_seed=2)
    assert [p["n"] for p in res["per_n"]] == [5.0, 10.0]
    for p in res["per_n"]:
        assert p["path_mean"] > 0 and p["edge_mean"] > 0
    with pytest.raises(ValueError, match="inner window"):
        path_census((50.0,), replicates=1, window=SimWindow(40.0))


# ----------------------------------------------------------------- regression anchor

# scripts/pin_anchor.py: exponential(1), r = 50, SimWindow(75), 8 angles,
# 2000 replicates, master seed 987654
ANCHOR_MU, ANCHOR_SE = 0.23047532429500017, 0.00021634558067993147


def test_mu_regression_anchor():
    e = estimate_mu(EXP, 50.0, replicates=60, window=SimWindow(75.0), master_seed=1)
    assert abs(e.value - ANCHOR_MU) <= 3 * np.hypot(e.stderr, ANCHOR_SE)
