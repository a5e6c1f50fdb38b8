"""Dispatch an ExperimentConfig and write its artifacts.

Layout under ``<out>/<config hash>/``::

    config.json    the full configuration
    raw/*.csv      per-replicate rows (byte-identical on rerun)
    summary.json   aggregates, tool version, timing, seed audit
    render.svg     when the config asks for it (always for kind "render")
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from fpplab import __version__
from fpplab import rng as rngmod
from fpplab.busemann import slope_experiment
from fpplab.competition import (
    InsufficientBranchError,
    branch_points,
    coexistence,
    compete,
    estimate_direction,
    extract_interface,
    sector_coverage,
)
from fpplab.estimators import coexistence_curve, estimate_mu, path_census
from fpplab.fpp import single_source
from fpplab.geometry import locate, points_csv_text, voronoi_dual
from fpplab.harness import io as hio
from fpplab.harness.config import ExperimentConfig
from fpplab.harness.render import svg_text
from fpplab.replicate import make_configuration, map_replicates

OUT_ENV = "FPPLAB_OUT"
DEFAULT_OUT = "fpplab-out"


def default_out_root() -> Path:
    return Path(os.environ.get(OUT_ENV, DEFAULT_OUT))


@dataclass
class ResultRecord:
    config_hash: str
    raw: dict  # file stem -> CSV text
    summary: dict
    version: str = __version__
    wall_clock: float = 0.0
    seeds: list = field(default_factory=list)
    directory: Path | None = None
    svg: str | None = None


def _configure(cfg: ExperimentConfig, rep: int):
    return make_configuration(cfg.window, cfg.intensity, cfg.passage_law, cfg.master_seed, rep)


# ----------------------------------------------------------------- per-kind work


def _simulate_rep(rep, cfg):
    c = _configure(cfg, rep)
    d = c.delaunay
    f = single_source(d, c.weights, locate((0.0, 0.0), d))
    summary = {"replicate": rep, "points": int(d.n_vertices), "edges": int(len(d.edges)), "max_dist": float(f.dist.max())}
    return {f"points_{rep:04d}": points_csv_text(c.points), f"field_{rep:04d}": f.to_csv(d.points)}, summary


def _simulate(cfg):
    res = map_replicates(partial(_simulate_rep, cfg=cfg), range(cfg.replicates), cfg.workers)
    raw = {k: v for files, _ in res for k, v in files.items()}
    return raw, {"replicates": [s for _, s in res]}, None


def _shape(cfg):
    angles = cfg.angles or list(np.linspace(0, 2 * np.pi, 8, endpoint=False))
    raw, summ = {}, {"radii": {}}
    for r in cfg.radii:
        est = estimate_mu(cfg.passage_law, float(r), angles, cfg.replicates, window=cfg.window,
                          master_seed=cfg.master_seed, intensity=cfg.intensity, workers=cfg.workers)
        rows = [[i, float(a), float(est.samples[i, j])] for i in range(est.replicates) for j, a in enumerate(angles)]
        raw[f"mu_r{float(r):g}"] = hio.csv_text(["replicate", "angle", "T_over_r"], rows)
        d = est.to_dict()
        d["isotropy_violations"] = [list(p) for p in est.isotropy_violations()]
        summ["radii"][repr(float(r))] = d
    return raw, summ, None


def _busemann(cfg):
    ests = slope_experiment(cfg.passage_law, cfg.alphas, cfg.n_values, cfg.replicates, cfg.window,
                            master_seed=cfg.master_seed, intensity=cfg.intensity, workers=cfg.workers)
    header = ["replicate", "alpha", "n", "stabilized", "H", "last_diff", "T_n0", "mu_rep"]
    rows = [r for e in ests for r in e.rows]
    rows.sort(key=lambda r: (r["replicate"], r["alpha"], r["n"]))
    return {"slopes": hio.csv_text(header, rows)}, {"estimates": [e.to_dict() for e in ests]}, None


def _compete_rep(rep, cfg):
    c = _configure(cfg, rep)
    d = c.delaunay
    seeds = cfg.seed_set()
    vor = voronoi_dual(d)
    lab = compete(d, c.weights, seeds)
    g = extract_interface(lab, vor)
    branch_rows = []
    for i, b in enumerate(g.branches):
        theta = exponent = float("nan")
        if b.boundary_end:
            try:
                bd = estimate_direction(branch_points(b, vor), cfg.window)
                theta, exponent = bd.theta, bd.exponent
            except InsufficientBranchError:
                pass
        branch_rows.append([i, b.species[0], b.species[1], b.boundary_end, b.closed, list(b.vertices), theta, exponent])
    files = {
        f"labeling_{rep:04d}": hio.csv_text(hio.LABELING_HEADER, hio.labeling_rows(lab, d.points)),
        f"interface_{rep:04d}": hio.csv_text(hio.INTERFACE_HEADER, hio.interface_rows(g.edges, d)),
        f"branches_{rep:04d}": hio.csv_text(hio.BRANCH_HEADER, branch_rows),
    }
    summary = {
        "replicate": rep,
        "survival": coexistence(lab, d, cfg.window).tolist(),
        "coverage": sector_coverage(lab, seeds, cfg.eps, d, cfg.window).tolist() if seeds.layout == "polygon" else None,
        "interface_edges": int(len(g.edges)),
        "branches": len(g.branches),
        "collided": lab.collided.tolist(),
    }
    svg = svg_text(lab, g.edges, vor, seeds.points) if rep == 0 and (cfg.render or cfg.kind == "render") else None
    return files, summary, svg


def _compete(cfg):
    reps = range(1 if cfg.kind == "render" else cfg.replicates)
    res = map_replicates(partial(_compete_rep, cfg=cfg), reps, cfg.workers)
    raw = {k: v for files, _, _ in res for k, v in files.items()}
    per = [s for _, s, _ in res]
    summ = {
        "replicates": per,
        "coexistence_fraction": float(np.mean([all(s["survival"]) for s in per])),
    }
    return raw, summ, res[0][2]


def _coexist(cfg):
    k = int(cfg.seeds["k"])
    c = coexistence_curve(k, cfg.radii, cfg.replicates, cfg.eps, window=cfg.window, law=cfg.passage_law,
                          master_seed=cfg.master_seed, intensity=cfg.intensity, workers=cfg.workers)
    raw_rows = [
        [rep, float(r), flags[0], flags[1]]
        for rep, per_r in enumerate(c.extra["raw"])
        for r, flags in zip(c.x, per_r)
    ]
    summ = c.to_dict()
    summ.pop("raw")
    curve = [[float(x), float(y), float(l), float(h), cv, cl, ch] for x, y, l, h, cv, cl, ch in zip(
        c.x, c.y, c.lo, c.hi, c.extra["coverage"], c.extra["coverage_lo"], c.extra["coverage_hi"])]
    return {
        "coexist": hio.csv_text(["replicate", "r", "coexist", "covered"], raw_rows),
        "curve": hio.csv_text(["r", "p_coexist", "lo", "hi", "p_cover", "cover_lo", "cover_hi"], curve),
    }, summ, None


def _census(cfg):
    res = path_census(cfg.n_values, cfg.replicates, window=cfg.window, law=cfg.passage_law,
                      master_seed=cfg.master_seed, intensity=cfg.intensity, workers=cfg.workers)
    rows = [[rep, n, g, e] for rep, per_n in enumerate(res["raw"]) for n, (g, e) in zip(res["n_values"], per_n)]
    res.pop("raw")
    return {"census": hio.csv_text(["replicate", "n", "path_over_n", "edges_over_n"], rows)}, res, None


HANDLERS = {
    "simulate": _simulate,
    "shape": _shape,
    "busemann": _busemann,
    "compete": _compete,
    "render": _compete,
    "coexist": _coexist,
    "census": _census,
}


def execute(cfg: ExperimentConfig) -> ResultRecord:
    """Run without touching the filesystem."""
    t0 = time.perf_counter()
    raw, summary, svg = HANDLERS[cfg.kind](cfg)
    wall = time.perf_counter() - t0
    seeds = [rngmod.seed_record(cfg.master_seed, s, r) for r in range(cfg.replicates) for s in (rngmod.GEOMETRY, rngmod.WEIGHTS)]
    return ResultRecord(cfg.config_hash(), raw, summary, __version__, wall, seeds, None, svg)


def run(cfg: ExperimentConfig, out_root=None) -> ResultRecord:
    rec = execute(cfg)
    root = Path(out_root or cfg.out or default_out_root())
    target = root / rec.config_hash
    hio.atomic_write_text(target / "config.json", cfg.to_json())
    for stem, text in sorted(rec.raw.items()):
        hio.atomic_write_text(target / "raw" / f"{stem}.csv", text)
    hio.write_json(
        target / "summary.json",
        {
            "schema_version": hio.SCHEMA_VERSION,
            "kind": cfg.kind,
            "config_hash": rec.config_hash,
            "version": rec.version,
            "wall_clock_seconds": rec.wall_clock,
            "rng": {"generator": "Philox", "streams": rec.seeds[:2], "replicates": cfg.replicates},
            "summary": rec.summary,
        },
    )
    if rec.svg is not None:
        hio.atomic_write_text(target / "render.svg", rec.svg)
    rec.directory = target
    return rec
