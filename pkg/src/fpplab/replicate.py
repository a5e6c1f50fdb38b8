"""One random configuration per replicate, and an order-preserving map."""

from __future__ import annotations

import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from fpplab.fpp import EdgeWeights, PassageTimeLaw, assign_weights
from fpplab.geometry.delaunay import DelaunayGraph, build_delaunay
from fpplab.geometry.window import DegenerateConfigurationError, PointSet, SimWindow, sample_poisson

# replicate-index offset used when a draw is degenerate
RETRY_STRIDE = 1_000_003


@dataclass(frozen=True, eq=False)
class Configuration:
    points: PointSet
    delaunay: DelaunayGraph
    weights: EdgeWeights
    replicate: int


def make_configuration(
    window: SimWindow, intensity: float, law: PassageTimeLaw, master_seed: int, replicate: int, max_retries: int = 5
) -> Configuration:
    idx = replicate
    for _ in range(max_retries + 1):
        try:
            pts = sample_poisson(window, intensity, master_seed, idx)
            tri = build_delaunay(pts)
            break
        except DegenerateConfigurationError:
            idx += RETRY_STRIDE
    else:
        raise DegenerateConfigurationError(f"replicate {replicate}: {max_retries + 1} degenerate draws in a row")
    return Configuration(pts, tri, assign_weights(tri, law, master_seed, idx), replicate)


def map_replicates(fn, items, workers: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally across worker processes.

    Results are returned in input order so reductions do not depend on the
    worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    ctx = mp.get_context("fork")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def quarter_turn(cfg: Configuration, turns: int = 1) -> Configuration:
    """The configuration rotated by ``turns`` quarter turns about the origin.

    A quarter turn permutes and negates coordinates, so it is exact in
    floating point and maps the square window onto itself.  Weights follow
    their edges; the rotated triangulation must have the same edge list.
    """
    pts = np.asarray(cfg.points.points)
    for _ in range(turns % 4):
        pts = np.column_stack([-pts[:, 1], pts[:, 0]])
    rot = PointSet(pts, cfg.points.intensity, cfg.points.window, dict(cfg.points.seed, quarter_turns=turns % 4))
    tri = build_delaunay(rot)
    if not np.array_equal(tri.edges, cfg.delaunay.edges):
        raise DegenerateConfigurationError("rotation changed the triangulation")
    return Configuration(rot, tri, cfg.weights, cfg.replicate)
