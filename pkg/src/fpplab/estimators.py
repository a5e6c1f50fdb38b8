"""Monte Carlo estimators built on shared per-replicate configurations."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Sequence

import numpy as np

from fpplab.competition import (
    InsufficientBranchError,
    SeedSet,
    branch_points,
    coexistence,
    compete,
    estimate_direction,
    extract_interface,
    sector_coverage,
)
from fpplab.fpp import (
    PassageTimeLaw,
    assign_weights,
    boundary_paths,
    geodesic_tree,
    hop_distance,
    single_source,
)
from fpplab.geometry import (
    OutsideWindowError,
    SimWindow,
    edge_census,
    locate,
    segment_path,
    voronoi_dual,
)
from fpplab.replicate import Configuration, make_configuration, map_replicates, quarter_turn
from fpplab.stats import mean_interval, wilson_interval

DEFAULT_ANGLES = tuple(np.linspace(0.0, 2 * np.pi, 8, endpoint=False))
# angles below this are rounding noise on a straight path
ANGLE_FLOOR = 1e-12


@dataclass
class ScalarEstimate:
    name: str
    value: float
    stderr: float
    replicates: int
    method: dict
    ci: tuple[float, float] = (float("nan"), float("nan"))
    per_angle: dict = field(default_factory=dict)
    samples: np.ndarray | None = field(default=None, repr=False)

    def isotropy_violations(self, k: float = 3.0) -> list[tuple[float, float]]:
        """Angle pairs whose estimates differ by more than k combined stderrs."""
        items = sorted(self.per_angle.items())
        bad = []
        for i, (a, (m1, s1)) in enumerate(items):
            for b, (m2, s2) in items[i + 1 :]:
                if abs(m1 - m2) > k * np.hypot(s1, s2):
                    bad.append((a, b))
        return bad

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "stderr": self.stderr,
            "ci": list(self.ci),
            "replicates": self.replicates,
            "method": self.method,
            "per_angle": {repr(float(a)): list(v) for a, v in sorted(self.per_angle.items())},
        }


@dataclass
class CurveEstimate:
    name: str
    x: np.ndarray
    y: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    replicates: int
    method: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        return [
            {"x": float(x), "y": float(y), "lo": float(l), "hi": float(h)}
            for x, y, l, h in zip(self.x, self.y, self.lo, self.hi)
        ]

    def to_dict(self) -> dict:
        return {"name": self.name, "replicates": self.replicates, "method": self.method, "points": self.rows(), **self.extra}


def _scalar(name: str, samples: np.ndarray, angles, method: dict) -> ScalarEstimate:
    """samples: (replicates, angles) array."""
    per_rep = samples.mean(axis=1)
    m, se, lo, hi = mean_interval(per_rep)
    per_angle = {}
    for j, a in enumerate(angles):
        am, ase, _, _ = mean_interval(samples[:, j])
        per_angle[float(a)] = (am, ase)
    return ScalarEstimate(name, m, se, len(per_rep), method, (lo, hi), per_angle, samples)


def _ring(r: float, angles) -> np.ndarray:
    a = np.asarray(angles, dtype=float)
    return r * np.column_stack([np.cos(a), np.sin(a)])


def _check_radius(r: float, window: SimWindow) -> None:
    if r > window.inner_half_width:
        raise OutsideWindowError(f"radius {r:g} exceeds the inner half-width {window.inner_half_width:g}")


# ----------------------------------------------------------------- time constant


def _mu_replicate(rep, *, window, intensity, laws, master_seed, r, angles):
    cfg = make_configuration(window, intensity, laws[0], master_seed, rep)
    d = cfg.delaunay
    v0 = locate((0.0, 0.0), d)
    probes = np.atleast_1d(locate(_ring(r, angles), d))
    out = []
    for law in laws:
        w = cfg.weights if law is laws[0] else assign_weights(d, law, master_seed, rep)
        out.append(single_source(d, w, v0).dist[probes] / r)
    return np.array(out)


def estimate_mu_laws(
    laws: Sequence[PassageTimeLaw],
    r: float,
    angles=DEFAULT_ANGLES,
    replicates: int = 20,
    window: SimWindow | None = None,
    master_seed: int = 0,
    intensity: float = 1.0,
    workers: int = 1,
) -> list[ScalarEstimate]:
    """mu-hat for several laws on the same point configurations.

    Each law draws its weights from the same random stream, so a rescaled
    law gives exactly rescaled weights.
    """
    window = window or SimWindow(1.5 * r)
    _check_radius(r, window)
    laws = list(laws)
    fn = partial(_mu_replicate, window=window, intensity=intensity, laws=laws, master_seed=master_seed, r=r, angles=angles)
    data = np.stack(map_replicates(fn, range(replicates), workers))  # (rep, law, angle)
    out = []
    for i, law in enumerate(laws):
        method = {"r": r, "angles": [float(a) for a in angles], "law": law.to_dict(), "window": window.to_dict()}
        out.append(_scalar("mu", data[:, i, :], angles, method))
    return out


def estimate_mu(law: PassageTimeLaw, r: float, angles=DEFAULT_ANGLES, replicates: int = 20, **kw) -> ScalarEstimate:
    """mu-hat = mean of T(0, r e^{ia}) / r over replicates and angles."""
    return estimate_mu_laws([law], r, angles, replicates, **kw)[0]


def _nu_replicate(rep, *, window, intensity, master_seed, r_values, angles):
    cfg = make_configuration(window, intensity, PassageTimeLaw.exponential(), master_seed, rep)
    d = cfg.delaunay
    v0 = locate((0.0, 0.0), d)
    return np.array(
        [[hop_distance(d, [v0], [locate(tuple(p), d)]) / r for p in _ring(r, angles)] for r in r_values]
    )


def estimate_nu(
    r_values,
    replicates: int = 20,
    angles=DEFAULT_ANGLES,
    window: SimWindow | None = None,
    master_seed: int = 0,
    intensity: float = 1.0,
    workers: int = 1,
) -> ScalarEstimate:
    """nu-hat from hop counts T_D(0, r e^{ia}) / r at the largest radius.

    Per-radius means are kept in ``method['by_radius']``.
    """
    r_values = [float(r) for r in np.atleast_1d(r_values)]
    window = window or SimWindow(1.5 * max(r_values))
    for r in r_values:
        _check_radius(r, window)
    fn = partial(_nu_replicate, window=window, intensity=intensity, master_seed=master_seed, r_values=r_values, angles=angles)
    data = np.stack(map_replicates(fn, range(replicates), workers))  # (rep, r, angle)
    method = {
        "r_values": r_values,
        "angles": [float(a) for a in angles],
        "window": window.to_dict(),
        "by_radius": {repr(r): float(data[:, i].mean()) for i, r in enumerate(r_values)},
    }
    return _scalar("nu", data[:, -1, :], angles, method)


# ----------------------------------------------------------------- fluctuations


def _fluct_replicate(rep, *, configure, r_values):
    cfg = configure(rep)
    d = cfg.delaunay
    f = single_source(d, cfg.weights, locate((0.0, 0.0), d))
    return np.array([f.dist[locate((r, 0.0), d)] for r in r_values])


def fluctuation_diagnostics(
    law: PassageTimeLaw,
    r_values,
    replicates: int = 20,
    mu_hat: float | None = None,
    window: SimWindow | None = None,
    master_seed: int = 0,
    intensity: float = 1.0,
    workers: int = 1,
    configure: Callable[[int], Configuration] | None = None,
) -> CurveEstimate:
    """Spread of T(0, r e1) - mu r against r, with a log-log growth exponent.

    Without ``mu_hat`` the slope of the mean passage time at the largest
    radius is used.  ``configure`` replaces the random configuration builder
    (for deterministic fixtures).
    """
    r_values = np.asarray(r_values, dtype=float)
    window = window or SimWindow(1.5 * r_values.max())
    for r in r_values:
        _check_radius(r, window)
    configure = configure or partial(make_configuration, window, intensity, law, master_seed)
    T = np.stack(map_replicates(partial(_fluct_replicate, configure=configure, r_values=r_values), range(replicates), workers))
    if mu_hat is None:
        mu_hat = float(T[:, -1].mean() / r_values[-1])
    resid = T - mu_hat * r_values
    spread = resid.std(axis=0, ddof=1) if replicates > 1 else np.zeros(len(r_values))
    rm = np.array([mean_interval(resid[:, i]) for i in range(len(r_values))])
    ok = spread > 0
    exponent = float(np.polyfit(np.log(r_values[ok]), np.log(spread[ok]), 1)[0]) if ok.sum() >= 2 else float("nan")
    return CurveEstimate(
        "fluctuation_spread",
        r_values,
        spread,
        spread,
        spread,
        replicates,
        {"law": law.to_dict(), "mu_hat": mu_hat, "window": window.to_dict()},
        {
            "growth_exponent": exponent,
            "residual_mean": rm[:, 0].tolist(),
            "residual_ci": rm[:, 2:].tolist(),
        },
    )


# ----------------------------------------------------------------- coexistence


def _coexist_replicate(rep, *, window, intensity, law, master_seed, k, r_values, eps, spacing):
    cfg = make_configuration(window, intensity, law, master_seed, rep)
    row = []
    for r in r_values:
        seeds = SeedSet.regular_polygon(k, r)
        lab = compete(cfg.delaunay, cfg.weights, seeds)
        alive = coexistence(lab, cfg.delaunay, window, spacing)
        cover = sector_coverage(lab, seeds, eps, cfg.delaunay, window, spacing)
        row.append((bool(alive.all()), bool(cover.all())))
    return row


def coexistence_curve(
    k: int,
    r_values,
    replicates: int = 20,
    eps: float = np.pi / 8,
    window: SimWindow | None = None,
    law: PassageTimeLaw | None = None,
    master_seed: int = 0,
    intensity: float = 1.0,
    spacing: float = np.deg2rad(1.0),
    workers: int = 1,
) -> CurveEstimate:
    """P(k-coexistence) against seed radius r, with sector coverage in
    ``extra``.  Every r reuses the replicate's configuration."""
    r_values = [float(r) for r in np.atleast_1d(r_values)]
    law = law or PassageTimeLaw.exponential()
    window = window or SimWindow(100.0)
    for r in r_values:
        _check_radius(r, window)
    fn = partial(
        _coexist_replicate, window=window, intensity=intensity, law=law, master_seed=master_seed,
        k=k, r_values=r_values, eps=eps, spacing=spacing,
    )
    res = np.array(map_replicates(fn, range(replicates), workers), dtype=bool)  # (rep, r, 2)
    co = res[:, :, 0].sum(axis=0)
    cov = res[:, :, 1].sum(axis=0)
    co_ci = np.array([wilson_interval(int(s), replicates) for s in co])
    cov_ci = np.array([wilson_interval(int(s), replicates) for s in cov])
    return CurveEstimate(
        "coexistence",
        np.array(r_values),
        co / replicates,
        co_ci[:, 0],
        co_ci[:, 1],
        replicates,
        {"k": k, "eps": eps, "spacing": spacing, "law": law.to_dict(), "window": window.to_dict()},
        {
            "coverage": (cov / replicates).tolist(),
            "coverage_lo": cov_ci[:, 0].tolist(),
            "coverage_hi": cov_ci[:, 1].tolist(),
            "raw": res.tolist(),
        },
    )


# ----------------------------------------------------------------- straightness


def max_forward_angle(path_points: np.ndarray) -> np.ndarray:
    """For each n, max over m > n of the angle between x_n and x_m."""
    p = np.asarray(path_points, dtype=float)
    th = np.arctan2(p[:, 1], p[:, 0])
    out = np.zeros(len(p))
    for n in range(len(p) - 1):
        d = np.abs(np.angle(np.exp(1j * (th[n + 1 :] - th[n]))))
        out[n] = d.max()
    return out


def path_straightness(path_points: np.ndarray, r_min: float) -> tuple[float, np.ndarray, np.ndarray]:
    """Decay exponent of max_{m>n} ang(x_n, x_m) against |x_n| for |x_n| >= r_min."""
    p = np.asarray(path_points, dtype=float)
    rad = np.hypot(p[:, 0], p[:, 1])
    a = max_forward_angle(p)
    keep = (rad >= r_min) & (a > ANGLE_FLOOR)
    if keep.sum() < 3:
        return float("nan"), rad[keep], a[keep]
    return float(np.polyfit(np.log(rad[keep]), np.log(a[keep]), 1)[0]), rad[keep], a[keep]


def _straight_replicate(rep, *, window, intensity, law, master_seed, paths_per_replicate):
    cfg = make_configuration(window, intensity, law, master_seed, rep)
    d = cfg.delaunay
    tree = geodesic_tree(single_source(d, cfg.weights, locate((0.0, 0.0), d)))
    paths = boundary_paths(tree, d.points, window.inner_half_width)
    if not paths:
        return []
    pick = np.unique(np.linspace(0, len(paths) - 1, min(paths_per_replicate, len(paths))).astype(int))
    out = []
    for i in pick:
        e, _, _ = path_straightness(d.points[paths[i]], window.half_width / 4)
        out.append(e)
    return out


def straightness_census(
    replicates: int = 20,
    window: SimWindow | None = None,
    law: PassageTimeLaw | None = None,
    master_seed: int = 0,
    intensity: float = 1.0,
    paths_per_replicate: int = 16,
    workers: int = 1,
) -> CurveEstimate:
    """Fitted decay exponents of boundary-reaching geodesics from the origin.

    The curve is the empirical distribution of exponents (sorted values
    against their quantile); ``extra['negative_fraction']`` is the share of
    paths with a negative exponent.
    """
    window = window or SimWindow(100.0)
    law = law or PassageTimeLaw.exponential()
    fn = partial(
        _straight_replicate, window=window, intensity=intensity, law=law, master_seed=master_seed,
        paths_per_replicate=paths_per_replicate,
    )
    ex = np.array([e for rep in map_replicates(fn, range(replicates), workers) for e in rep], dtype=float)
    ex = ex[np.isfinite(ex)]
    neg = int((ex < 0).sum())
    lo, hi = wilson_interval(neg, len(ex))
    srt = np.sort(ex)
    q = (np.arange(len(srt)) + 0.5) / max(len(srt), 1)
    return CurveEstimate(
        "straightness_exponents",
        q,
        srt,
        srt,
        srt,
        replicates,
        {"law": law.to_dict(), "window": window.to_dict(), "paths_per_replicate": paths_per_replicate},
        {
            "n_paths": int(len(ex)),
            "negative_fraction": neg / len(ex) if len(ex) else float("nan"),
            "negative_ci": [lo, hi],
            "in_admissible_range": float(np.mean((ex > -0.25) & (ex < 0))) if len(ex) else float("nan"),
        },
    )


# ----------------------------------------------------------------- interface branches


def _branch_directions(cfg, seeds, window):
    d = cfg.delaunay
    vor = voronoi_dual(d)
    lab = compete(d, cfg.weights, seeds)
    g = extract_interface(lab, vor)
    out = {}
    for i, b in enumerate(g.branches):
        if not b.boundary_end:
            continue
        try:
            out[i] = estimate_direction(branch_points(b, vor), window)
        except InsufficientBranchError:
            continue
    return lab, g, out


def _wrap(a):
    return float(abs((a + np.pi) % (2 * np.pi) - np.pi))


def _interface_replicate(rep, *, window, intensity, law, master_seed, seeds, rotate):
    cfg = make_configuration(window, intensity, law, master_seed, rep)
    lab, g, dirs = _branch_directions(cfg, seeds, window)
    covered = sorted(e for b in g.branches for e in b.edges)
    partition = covered == sorted(map(int, g.edges))
    rows = [
        {"replicate": rep, "branch": i, "theta": bd.theta, "exponent": bd.exponent, "n_used": bd.n_used}
        for i, bd in dirs.items()
    ]
    rotation = None
    if rotate:
        turned = SeedSet(np.column_stack([-seeds.points[:, 1], seeds.points[:, 0]]))
        lab_r, g_r, dirs_r = _branch_directions(quarter_turn(cfg), turned, window)
        same = np.array_equal(lab.label, lab_r.label) and [b.edges for b in g.branches] == [b.edges for b in g_r.branches]
        same = same and dirs.keys() == dirs_r.keys()
        err = max((_wrap(dirs_r[i].theta - dirs[i].theta - np.pi / 2) for i in dirs if i in dirs_r), default=0.0)
        rotation = {"structure_identical": bool(same), "max_theta_error": err}
    return partition, rows, rotation


def interface_census(
    replicates: int = 20,
    seeds: SeedSet | None = None,
    window: SimWindow | None = None,
    law: PassageTimeLaw | None = None,
    master_seed: int = 0,
    intensity: float = 1.0,
    workers: int = 1,
    rotate: bool = False,
) -> dict:
    """Branch partition audit and per-branch direction/exponent for k seeds.

    With ``rotate`` each replicate is also run a quarter turn about the
    origin and the branch directions are compared.
    """
    window = window or SimWindow(100.0)
    law = law or PassageTimeLaw.exponential()
    seeds = seeds or SeedSet.regular_polygon(2, 10.0)
    fn = partial(
        _interface_replicate, window=window, intensity=intensity, law=law, master_seed=master_seed, seeds=seeds, rotate=rotate
    )
    res = map_replicates(fn, range(replicates), workers)
    rows = [r for _, rr, _ in res for r in rr]
    ex = np.array([r["exponent"] for r in rows], dtype=float)
    ex = ex[np.isfinite(ex)]
    out = {
        "replicates": replicates,
        "partition_ok": [bool(p) for p, _, _ in res],
        "branches": rows,
        "negative_fraction": float(np.mean(ex < 0)) if len(ex) else float("nan"),
    }
    if rotate:
        out["rotation"] = [r for _, _, r in res]
    return out


# ----------------------------------------------------------------- path and edge census


def _census_replicate(rep, *, window, intensity, law, master_seed, n_values):
    cfg = make_configuration(window, intensity, law, master_seed, rep)
    d = cfg.delaunay
    vor = voronoi_dual(d)
    out = []
    for n in n_values:
        gamma = segment_path((0.0, 0.0), (n, 0.0), d, vor)
        out.append((len(gamma.vertices) / n, edge_census(n, d, vor).count / n))
    return out


def tail_profile(values: np.ndarray, n_grid: int = 8) -> dict:
    """Empirical upper-tail frequency P(X >= z) on a grid from the median to
    the largest observation, with a fitted log-linear slope."""
    x = np.sort(np.asarray(values, dtype=float))
    z = np.unique(np.quantile(x, np.linspace(0.5, 1.0, n_grid)))
    freq = np.array([(x >= zz).mean() for zz in z])
    slope = float(np.polyfit(z, np.log(freq), 1)[0]) if len(z) >= 2 else float("nan")
    return {"z": z.tolist(), "freq": freq.tolist(), "log_slope": slope}


def path_census(
    n_values=(20.0, 40.0, 80.0),
    replicates: int = 20,
    window: SimWindow | None = None,
    law: PassageTimeLaw | None = None,
    master_seed: int = 0,
    intensity: float = 1.0,
    workers: int = 1,
) -> dict:
    """|gamma(0, n e1)| / n and |E_n| / n per replicate, their means and tails."""
    n_values = [float(n) for n in n_values]
    window = window or SimWindow(np.ceil((max(n_values) + 1.0) / 0.8) + 5.0)
    if max(n_values) + 0.5 > window.inner_half_width:
        raise OutsideWindowError(f"n = {max(n_values):g} does not fit the inner window (needs n + 0.5 <= {window.inner_half_width:g})")
    law = law or PassageTimeLaw.exponential()
    fn = partial(_census_replicate, window=window, intensity=intensity, law=law, master_seed=master_seed, n_values=n_values)
    data = np.array(map_replicates(fn, range(replicates), workers))  # (rep, n, 2)
    out = {"n_values": n_values, "replicates": replicates, "window": window.to_dict(), "per_n": []}
    for i, n in enumerate(n_values):
        g, e = data[:, i, 0], data[:, i, 1]
        gm, gse, _, _ = mean_interval(g)
        em, ese, _, _ = mean_interval(e)
        out["per_n"].append(
            {
                "n": n,
                "path_mean": gm,
                "path_stderr": gse,
                "edge_mean": em,
                "edge_stderr": ese,
                "path_tail": tail_profile(g),
                "edge_tail": tail_profile(e),
            }
        )
    out["raw"] = data.tolist()
    return out
