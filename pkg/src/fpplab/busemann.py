"""Busemann differences T(v, s e^{ia}) - T(w, s e^{ia}) along rays.

With the weights fixed, the difference stops changing once the geodesics
from v and w to the probe merge, so stabilization is detected as exact
constancy (up to float noise) of the trailing samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from fpplab import rng as rngmod
from fpplab.fpp import FppField, PassageTimeLaw, geodesic, single_source
from fpplab.geometry.delaunay import DelaunayGraph, locate
from fpplab.geometry.window import OutsideWindowError, SimWindow
from fpplab.replicate import make_configuration, map_replicates
from fpplab.stats import mean_interval

STABLE_TOL = 1e-9


def max_probe_radius(window: SimWindow, alpha: float) -> float:
    return window.inner_half_width / max(abs(np.cos(alpha)), abs(np.sin(alpha)))


def geometric_radii(window: SimWindow, alpha: float = 0.0, count: int = 10, start_fraction: float = 1 / 8) -> np.ndarray:
    top = max_probe_radius(window, alpha)
    return np.geomspace(start_fraction * window.half_width, top, count)


def ray_probes(radii, alpha: float) -> np.ndarray:
    r = np.asarray(radii, dtype=float)
    return np.column_stack([r * np.cos(alpha), r * np.sin(alpha)])


@dataclass(frozen=True, eq=False)
class BusemannProfile:
    v: int
    vbar: int
    alpha: float
    radii: np.ndarray
    probes: np.ndarray
    diffs: np.ndarray
    stabilized: bool
    value: float | None
    stabilization_radius: float | None


def stabilization(diffs: np.ndarray, tol: float = STABLE_TOL) -> tuple[bool, int | None]:
    """Whether the trailing half is constant, and the first index from which
    every later sample matches the last one."""
    d = np.asarray(diffs, dtype=float)
    tail = d[len(d) // 2 :]
    stable = bool(tail.max() - tail.min() <= tol)
    close = np.abs(d - d[-1]) <= tol
    bad = np.flatnonzero(~close)
    first = int(bad[-1] + 1) if len(bad) else 0
    return stable, (first if stable else None)


def busemann_profile(
    delaunay: DelaunayGraph,
    weights,
    v: int,
    vbar: int,
    alpha: float,
    radii,
    window: SimWindow | None = None,
    fields: tuple[FppField, FppField] | None = None,
) -> BusemannProfile:
    window = window or delaunay.window
    radii = np.asarray(radii, dtype=float)
    if window is not None:
        smax = max_probe_radius(window, alpha)
        bad = radii[radii > smax + 1e-12]
        if len(bad):
            raise OutsideWindowError(f"probe radius {bad[0]:g} leaves the inner window; max admissible radius is {smax:g}")
    if fields is None:
        fv = single_source(delaunay, weights, v)
        fw = fv if vbar == v else single_source(delaunay, weights, vbar)
    else:
        fv, fw = fields
    probes = np.atleast_1d(locate(ray_probes(radii, alpha), delaunay))
    diffs = fv.dist[probes] - fw.dist[probes]
    stable, first = stabilization(diffs)
    return BusemannProfile(
        int(v), int(vbar), float(alpha), radii, probes, diffs, stable,
        float(diffs[-1]) if stable else None, float(radii[first]) if stable else None,
    )


def coalescence_point(field_v: FppField, field_vbar: FppField, probe: int) -> int | None:
    """First vertex of the geodesic v -> probe that also lies on vbar -> probe.

    Returns None when the two geodesics only meet at the probe itself.
    """
    path_v = geodesic(field_v, probe)
    on_w = set(geodesic(field_vbar, probe))
    for x in path_v:
        if x in on_w:
            if x == probe and field_v.source != field_vbar.source and len(path_v) > 1:
                return None
            return int(x)
    return None


def shared_suffix_gap(field_v: FppField, field_vbar: FppField, probe: int, c: int) -> float:
    """|(T(v,p) - T(w,p)) - (T(v,c) - T(w,c))|, zero up to rounding."""
    lhs = field_v.dist[probe] - field_vbar.dist[probe]
    rhs = field_v.dist[c] - field_vbar.dist[c]
    return float(abs(lhs - rhs))


def band(mu: float, alpha: float) -> tuple[float, float]:
    """Interval [-mu, -mu cos a / (1 + sin a)] for the limiting slope."""
    return (-mu, -mu * np.cos(alpha) / (1.0 + np.sin(alpha)))


# ----------------------------------------------------------------- slope experiment


@dataclass
class SlopeEstimate:
    """Slope statistics for one (alpha, n).

    ``stable_*`` use only replicates whose profile stabilized (the rest are
    counted in ``excluded``).  ``outer_*`` use the difference at the
    outermost probe of every replicate, which is what remains when the
    bases are too far apart for their geodesics to merge inside the window.
    """

    alpha: float
    n: float
    mu_hat: float
    band: tuple[float, float]
    conjecture: float
    stable_slope: float
    stable_ci: tuple[float, float]
    used: int
    excluded: int
    outer_slope: float
    outer_stderr: float
    outer_ci: tuple[float, float]
    in_band_fraction: float
    rows: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "rows"}
        return {k: (list(map(float, v)) if isinstance(v, tuple) else v) for k, v in d.items()}


def _slope_replicate(rep, *, window, intensity, law, master_seed, alphas, n_values, radii_count, mu_radius, mu_angles):
    cfg = make_configuration(window, intensity, law, master_seed, rep)
    d, w = cfg.delaunay, cfg.weights
    v0 = locate((0.0, 0.0), d)
    f0 = single_source(d, w, v0)
    ring = mu_radius * np.column_stack([np.cos(mu_angles), np.sin(mu_angles)])
    mu_probes = np.atleast_1d(locate(ring, d))
    mu_rep = float(np.mean(f0.dist[mu_probes]) / mu_radius)
    rows = []
    for n in n_values:
        vn = locate((float(n), 0.0), d)
        fn = single_source(d, w, vn)
        for a in alphas:
            prof = busemann_profile(d, w, vn, v0, a, geometric_radii(window, a, radii_count), window, (fn, f0))
            rows.append(
                {
                    "replicate": rep,
                    "alpha": float(a),
                    "n": float(n),
                    "stabilized": prof.stabilized,
                    "H": prof.value if prof.stabilized else float("nan"),
                    "last_diff": float(prof.diffs[-1]),
                    "T_n0": float(f0.dist[vn]),
                    "mu_rep": mu_rep,
                }
            )
    return rows


def slope_experiment(
    law: PassageTimeLaw,
    alphas,
    n_values,
    replicates: int,
    window: SimWindow,
    master_seed: int = 0,
    intensity: float = 1.0,
    mu_radius: float | None = None,
    mu_angles=None,
    radii_count: int = 10,
    workers: int = 1,
) -> list[SlopeEstimate]:
    """Per (alpha, n): H(n e1, 0) / n over replicates, against the band
    [-mu, -mu cos a/(1 + sin a)].

    ``mu_hat`` is T(0, r e^{ib}) / r averaged over replicates and angles on
    the same configurations.
    """
    alphas = [float(a) for a in np.atleast_1d(alphas)]
    for a in alphas:
        if not 0 <= a < np.pi / 2:
            raise ValueError(f"alpha must lie in [0, pi/2), got {a}")
    n_values = [float(n) for n in np.atleast_1d(n_values)]
    mu_radius = float(mu_radius if mu_radius is not None else max(n_values))
    mu_angles = np.asarray(mu_angles if mu_angles is not None else np.linspace(0, 2 * np.pi, 8, endpoint=False))
    for n in n_values + [mu_radius]:
        if n > window.inner_half_width:
            raise OutsideWindowError(f"n = {n:g} exceeds the inner half-width {window.inner_half_width:g}")
    fn = partial(
        _slope_replicate, window=window, intensity=intensity, law=law, master_seed=master_seed,
        alphas=alphas, n_values=n_values, radii_count=radii_count, mu_radius=mu_radius, mu_angles=mu_angles,
    )
    rows = [r for rep_rows in map_replicates(fn, range(replicates), workers) for r in rep_rows]
    mu_hat = float(np.mean([r["mu_rep"] for r in rows if r["alpha"] == alphas[0] and r["n"] == n_values[0]]))
    out = []
    for a in alphas:
        b = band(mu_hat, a)
        for n in n_values:
            sel = [r for r in rows if r["alpha"] == a and r["n"] == n]
            stable = np.array([r["H"] / n for r in sel if r["stabilized"]])
            outer = np.array([r["last_diff"] / n for r in sel])
            sm, _, slo, shi = mean_interval(stable) if len(stable) else (float("nan"),) * 4
            om, ose, olo, ohi = mean_interval(outer)
            out.append(
                SlopeEstimate(
                    alpha=a, n=n, mu_hat=mu_hat, band=(float(b[0]), float(b[1])), conjecture=float(-mu_hat * np.cos(a)),
                    stable_slope=sm, stable_ci=(slo, shi), used=len(stable), excluded=len(sel) - len(stable),
                    outer_slope=om, outer_stderr=ose, outer_ci=(olo, ohi),
                    in_band_fraction=float(np.mean((outer >= b[0]) & (outer <= b[1]))),
                    rows=sel,
                )
            )
    return out


# ----------------------------------------------------------------- stabilization census


def _nearby_base(d: DelaunayGraph, v: int, max_sep: float, gen: np.random.Generator) -> int:
    """A vertex other than v within max_sep of it, from a uniform offset in
    a disc of radius 0.8 max_sep (redrawn until the located tile qualifies)."""
    x = d.points[v]
    for _ in range(1000):
        r = 0.8 * max_sep * np.sqrt(gen.uniform())
        t = gen.uniform(0, 2 * np.pi)
        w = int(locate(x + r * np.array([np.cos(t), np.sin(t)]), d))
        if w != v and np.hypot(*(d.points[w] - x)) <= max_sep:
            return w
    raise RuntimeError("no second base vertex found")


def _census_replicate(rep, *, window, intensity, law, master_seed, max_sep, s_max, radii_count, coalesce_from):
    cfg = make_configuration(window, intensity, law, master_seed, rep)
    d, w = cfg.delaunay, cfg.weights
    gen = rngmod.stream(master_seed, rngmod.PROBES, rep)
    v = int(locate((0.0, 0.0), d))
    vbar = _nearby_base(d, v, max_sep, gen)
    alpha = float(gen.uniform(0, 2 * np.pi))
    radii = np.geomspace(window.half_width / 8, s_max, radii_count)
    fv, fw = single_source(d, w, v), single_source(d, w, vbar)
    prof = busemann_profile(d, w, v, vbar, alpha, radii, window, (fv, fw))
    found, gaps = 0, []
    far = np.flatnonzero(radii >= coalesce_from)
    for p in prof.probes[far]:
        c = coalescence_point(fv, fw, int(p))
        if c is not None:
            found += 1
            gaps.append(shared_suffix_gap(fv, fw, int(p), c))
    return {
        "replicate": rep,
        "v": v,
        "vbar": vbar,
        "separation": float(np.hypot(*(d.points[v] - d.points[vbar]))),
        "alpha": alpha,
        "T_v_vbar": float(fv.dist[vbar]),
        "stabilized": prof.stabilized,
        "H": prof.value if prof.stabilized else float("nan"),
        "stabilization_radius": prof.stabilization_radius if prof.stabilized else float("nan"),
        "max_abs_diff": float(np.max(np.abs(prof.diffs))),
        "far_probes": int(len(far)),
        "coalesced": found,
        "max_suffix_gap": max(gaps) if gaps else 0.0,
    }


def stabilization_census(
    replicates: int,
    window: SimWindow | None = None,
    law: PassageTimeLaw | None = None,
    max_sep: float = 5.0,
    s_max: float = 100.0,
    radii_count: int = 10,
    coalesce_from: float = 80.0,
    master_seed: int = 0,
    intensity: float = 1.0,
    workers: int = 1,
) -> dict:
    """Profiles for nearby base pairs (v at the origin, vbar within max_sep)
    along a random direction per replicate, probed out to s_max.

    Reports the stabilized fraction, whether stabilized values are nonzero,
    and a coalescence census over probes at radius >= coalesce_from.
    """
    window = window or SimWindow(150.0)
    law = law or PassageTimeLaw.exponential()
    if s_max > window.inner_half_width:
        raise OutsideWindowError(f"s_max = {s_max:g} exceeds the inner half-width {window.inner_half_width:g}")
    fn = partial(
        _census_replicate, window=window, intensity=intensity, law=law, master_seed=master_seed,
        max_sep=max_sep, s_max=s_max, radii_count=radii_count, coalesce_from=coalesce_from,
    )
    rows = map_replicates(fn, range(replicates), workers)
    stable = [r for r in rows if r["stabilized"]]
    far = sum(r["far_probes"] for r in rows)
    return {
        "replicates": replicates,
        "stabilized_fraction": len(stable) / replicates,
        "nonzero_fraction": float(np.mean([r["H"] != 0 for r in stable])) if stable else float("nan"),
        "coalescence_fraction": sum(r["coalesced"] for r in rows) / far if far else float("nan"),
        "max_suffix_gap": max(r["max_suffix_gap"] for r in rows),
        "rows": rows,
    }
