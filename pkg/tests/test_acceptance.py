"""End-to-end acceptance checks at their stated scale.

Every criterion uses master seed 0 and records a PASS/FAIL line that is
printed in the pytest terminal summary.
"""

import json
from time import perf_counter

import numpy as np
import pytest
from oracles import all_simple_path_costs, empty_circumcircle_violations, voronoi_neighbor_pairs

from fpplab import rng
from fpplab.busemann import slope_experiment, stabilization_census
from fpplab.competition import SeedSet
from fpplab.estimators import coexistence_curve, estimate_mu_laws, interface_census, path_census
from fpplab.fpp import EdgeWeights, PassageTimeLaw, assign_weights, geodesic, passage_time, single_source
from fpplab.geometry import SimWindow, build_delaunay, voronoi_dual
from fpplab.harness import ExperimentConfig, execute, run
from fpplab.replicate import make_configuration

SEED = 0
EXP = PassageTimeLaw.exponential(1.0)

pytestmark = pytest.mark.slow


def test_geometry_correctness(record):
    t0 = perf_counter()
    bad_circles = bad_duality = 0
    for s in range(20):
        pts = rng.stream(SEED, rng.GEOMETRY, s).uniform(-15.8, 15.8, size=(1000, 2))
        d = build_delaunay(pts)
        voronoi_dual(d)
        bad_circles += empty_circumcircle_violations(pts, d.triangles) > 0
        bad_duality += voronoi_neighbor_pairs(pts) != set(map(tuple, d.edges.tolist()))
    elapsed = perf_counter() - t0
    ok = record(
        1, "geometry correctness", bad_circles == 0 and bad_duality == 0 and elapsed < 10,
        f"20 x 1000 points, circumcircle failures {bad_circles}, duality failures {bad_duality}, {elapsed:.1f} s",
    )
    assert ok


def test_shortest_path_oracle(record):
    worst, non_unique = 0.0, 0
    for s in range(100):
        gen = rng.stream(SEED, rng.PROBES, s)
        n = int(gen.integers(3, 10))
        d = build_delaunay(gen.uniform(-1, 1, size=(n, 2)))
        w = assign_weights(d, EXP, SEED, s)
        src = int(gen.integers(n))
        f = single_source(d, w, src)
        best, count = all_simple_path_costs(n, d.edges, w.values, src)
        rel = np.abs(f.dist - best) / np.maximum(best, np.finfo(float).tiny)
        worst = max(worst, float(rel.max()))
        non_unique += int(np.any(count != 1))
    ok = record(
        2, "shortest-path oracle", worst <= 1e-12 and non_unique == 0,
        f"100 configurations, max relative error {worst:.1e}, non-unique geodesics in {non_unique}",
    )
    assert ok


def test_metric_properties(record):
    violations, resum_bad, triples = 0, 0, 0
    for s in range(5):
        cfg = make_configuration(SimWindow(15.0), 1.0, EXP, SEED, s)
        d, w = cfg.delaunay, cfg.weights
        gen = rng.stream(SEED, rng.PROBES, 1000 + s)
        sources = gen.choice(d.n_vertices, 100, replace=False)
        fields = {int(v): single_source(d, w, int(v)) for v in sources}
        x = gen.choice(sources, 10_000)
        y = gen.choice(sources, 10_000)
        z = gen.integers(0, d.n_vertices, 10_000)
        for a, b, c in zip(x.tolist(), y.tolist(), z.tolist()):
            fa, fb = fields[a], fields[b]
            violations += fa.dist[c] > fa.dist[b] + fb.dist[c] + 1e-9
            t = passage_time(geodesic(fa, c), d, w)
            resum_bad += abs(t - fa.dist[c]) > 1e-12 * max(fa.dist[c], 1e-300)
        triples += 10_000
    ok = record(
        3, "metric properties", violations == 0 and resum_bad == 0,
        f"{triples} triples over 5 configurations, triangle violations {violations}, re-summation mismatches {resum_bad}",
    )
    assert ok


def test_shape_isotropy(record):
    t0 = perf_counter()
    a, b = estimate_mu_laws([EXP, EXP.scaled(2.0)], 100.0, replicates=200, window=SimWindow(150.0), master_seed=SEED)
    elapsed = perf_counter() - t0
    viol = a.isotropy_violations(3.0)
    items = sorted(a.per_angle.values())
    worst = max(abs(m1 - m2) / np.hypot(s1, s2) for i, (m1, s1) in enumerate(items) for m2, s2 in items[i + 1 :])
    scaled = np.array_equal(b.samples, 2.0 * a.samples)
    ok = record(
        4, "shape isotropy", not viol and scaled and elapsed < 600,
        f"mu = {a.value:.4f} +- {a.stderr:.4f}, worst pair {worst:.2f} combined SE, "
        f"2x law exact per replicate: {scaled}, {elapsed:.0f} s",
    )
    assert ok


def test_busemann_stabilization(record):
    res = stabilization_census(100, window=SimWindow(150.0), max_sep=5.0, s_max=100.0, master_seed=SEED)
    frac, nonzero, gap = res["stabilized_fraction"], res["nonzero_fraction"], res["max_suffix_gap"]
    ok = record(
        5, "Busemann stabilization", frac >= 0.95 and nonzero == 1.0 and gap <= 1e-12,
        f"stabilized {frac:.2f} (need 0.95), nonzero among stabilized {nonzero:.2f}, "
        f"max shared-suffix gap {gap:.1e}, coalescence at radius >= 80 in {res['coalescence_fraction']:.2f} of probes",
    )
    assert ok


def test_slope_band(record):
    e0, e45 = slope_experiment(EXP, [0.0, np.pi / 4], [100.0], 100, SimWindow(150.0), master_seed=SEED)
    mu = e0.mu_hat
    ok0 = abs(e0.outer_slope + mu) <= 0.1 * mu
    lo, hi = -mu - 0.1 * mu, -(np.sqrt(2) - 1) * mu + 0.1 * mu
    ok45 = lo <= e45.outer_slope <= hi
    ok = record(
        6, "slope band", ok0 and ok45,
        f"mu = {mu:.4f}; alpha 0 slope {e0.outer_slope:.4f} (target {-mu:.4f} +- 10%); "
        f"alpha pi/4 slope {e45.outer_slope:.4f} in [{lo:.4f}, {hi:.4f}]; "
        f"stabilized replicates {e0.used}/100 and {e45.used}/100",
    )
    assert ok


def _no_significant_drop(y, lo, hi):
    return all(hi[j] >= lo[i] for i in range(len(y)) for j in range(i + 1, len(y)))


def test_coexistence_trend(record):
    c = coexistence_curve(3, [5.0, 10.0, 20.0, 40.0], 200, np.pi / 8, window=SimWindow(100.0), master_seed=SEED)
    cov, cov_lo, cov_hi = (np.array(c.extra[k]) for k in ("coverage", "coverage_lo", "coverage_hi"))
    trend = _no_significant_drop(c.y, c.lo, c.hi) and _no_significant_drop(cov, cov_lo, cov_hi)
    sep_co = c.lo[-1] > c.hi[0]
    sep_cov = cov_lo[-1] > cov_hi[0]
    ok = record(
        7, "coexistence trend", trend and sep_co and sep_cov,
        f"P(coexist) {np.round(c.y, 3).tolist()}, CI at r=5 [{c.lo[0]:.3f}, {c.hi[0]:.3f}] vs r=40 [{c.lo[-1]:.3f}, {c.hi[-1]:.3f}]; "
        f"P(cover) {np.round(cov, 3).tolist()}, r=5 [{cov_lo[0]:.3f}, {cov_hi[0]:.3f}] vs r=40 [{cov_lo[-1]:.3f}, {cov_hi[-1]:.3f}]",
    )
    assert ok


def test_interface_structure(record):
    res = interface_census(100, SeedSet.regular_polygon(2, 10.0), SimWindow(100.0), master_seed=SEED, rotate=True)
    partition = all(res["partition_ok"])
    neg = res["negative_fraction"]
    rot = res["rotation"]
    rot_ok = all(r["structure_identical"] for r in rot)
    rot_err = max(r["max_theta_error"] for r in rot)
    thetas = np.array([b["theta"] for b in res["branches"]])
    ok = record(
        8, "interface structure", partition and neg >= 0.9 and rot_ok and rot_err <= 1e-12,
        f"partition in {sum(res['partition_ok'])}/100, negative exponent {neg:.3f} of {len(res['branches'])} branches, "
        f"quarter-turn structure identical {rot_ok}, max theta error {rot_err:.1e}, distinct theta {len(np.unique(thetas))}",
    )
    assert ok


def test_census_tails(record):
    res = path_census((20.0, 40.0, 80.0), replicates=100, master_seed=SEED)
    path = np.array([p["path_mean"] for p in res["per_n"]])
    edge = np.array([p["edge_mean"] for p in res["per_n"]])
    stable = path.max() / path.min() - 1 <= 0.1 and edge.max() / edge.min() - 1 <= 0.1
    tails_ok = True
    for p in res["per_n"]:
        for t in (p["path_tail"], p["edge_tail"]):
            f = np.array(t["freq"])
            tails_ok &= bool(np.all(np.diff(f) <= 0) and f[-1] < f[0] and t["log_slope"] < 0)
    ok = record(
        9, "census tails", stable and tails_ok,
        f"|gamma|/n means {np.round(path, 3).tolist()}, |E_n|/n means {np.round(edge, 3).tolist()}, "
        f"tails decreasing {tails_ok}",
    )
    assert ok


REPRO = {
    "simulate": {"half_width": 15.0},
    "shape": {"half_width": 30.0, "radii": [10.0, 20.0]},
    "busemann": {"half_width": 30.0, "alphas": [0.0, 0.5], "n_values": [10.0]},
    "compete": {"half_width": 30.0, "seeds": {"layout": "polygon", "k": 3, "radius": 5.0}},
    "coexist": {"half_width": 30.0, "radii": [3.0, 6.0], "seeds": {"layout": "polygon", "k": 3, "radius": 3.0}},
    "census": {"half_width": 30.0, "n_values": [5.0, 10.0]},
    "render": {"half_width": 15.0, "seeds": {"layout": "polygon", "k": 3, "radius": 4.0}},
}


def test_reproducibility(record, tmp_path):
    identical, agg_equal = 0, 0
    for kind, fields in REPRO.items():
        cfg = ExperimentConfig.from_dict({"kind": kind, **fields, "replicates": 4, "master_seed": SEED})
        a, b = run(cfg, tmp_path / "a"), run(cfg, tmp_path / "b")
        files = sorted(p.name for p in (a.directory / "raw").iterdir())
        identical += files == sorted(p.name for p in (b.directory / "raw").iterdir()) and all(
            (a.directory / "raw" / f).read_bytes() == (b.directory / "raw" / f).read_bytes() for f in files
        )
        par = execute(cfg.replace(workers=2))
        agg_equal += par.raw == a.raw and json.dumps(par.summary, sort_keys=True) == json.dumps(a.summary, sort_keys=True)
    n = len(REPRO)
    ok = record(
        10, "reproducibility", identical == n and agg_equal == n,
        f"byte-identical reruns {identical}/{n} kinds, serial == 2 workers {agg_equal}/{n} kinds",
    )
    assert ok
