"""Walking a straight segment through the Voronoi tiles it crosses."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from fpplab.geometry.delaunay import DelaunayGraph, locate

log = logging.getLogger(__name__)

PERTURBATION = 1e-9
_TIE_TOL = 1e-13


class _VoronoiVertexHit(Exception):
    pass


@dataclass(frozen=True)
class SegmentPath:
    vertices: list[int]
    perturbation: tuple[float, float] = (0.0, 0.0)

    @property
    def n_edges(self) -> int:
        return len(self.vertices) - 1


def _trace(delaunay: DelaunayGraph, x: np.ndarray, y: np.ndarray) -> list[int]:
    pts = delaunay.points
    v = locate(x, delaunay)
    target = locate(y, delaunay)
    path = [v]
    d = y - x
    t_cur = 0.0
    limit = delaunay.n_vertices + 1
    while v != target:
        nb = delaunay.neighbors(v)
        w = pts[nb] - pts[v]
        # |p(t)-v|^2 <= |p(t)-u|^2  <=>  a t + b <= 0
        a = 2.0 * (w @ d)
        b = 2.0 * (w @ x) + pts[v] @ pts[v] - np.einsum("ij,ij->i", pts[nb], pts[nb])
        leaving = a > 0
        if not leaving.any():
            raise RuntimeError("segment does not leave the current tile")
        t = np.full(len(nb), np.inf)
        t[leaving] = -b[leaving] / a[leaving]
        t[t < t_cur - _TIE_TOL] = np.inf
        k = int(np.argmin(t))
        srt = np.sort(t)
        if len(srt) > 1 and srt[1] - srt[0] <= _TIE_TOL * max(1.0, abs(srt[0])):
            raise _VoronoiVertexHit
        t_cur = t[k]
        v = int(nb[k])
        path.append(v)
        if len(path) > limit:
            raise RuntimeError("segment walk did not terminate")
    return path


def segment_path(x, y, delaunay: DelaunayGraph, voronoi=None, max_retries: int = 8) -> SegmentPath:
    """Tiles crossed by the segment [x, y], as consecutive Delaunay neighbors.

    When the segment runs through a Voronoi vertex the end point ``y`` is
    nudged by a tiny deterministic offset and the walk is retried; the
    offset used is recorded on the result.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    offset = np.zeros(2)
    for attempt in range(max_retries + 1):
        try:
            return SegmentPath(_trace(delaunay, x, y + offset), (float(offset[0]), float(offset[1])))
        except _VoronoiVertexHit:
            ang = 0.7 + attempt
            offset = PERTURBATION * (attempt + 1) * np.array([np.cos(ang), np.sin(ang)])
            log.debug("segment hit a Voronoi vertex; retrying with offset %s", offset)
    raise RuntimeError("could not find a generic perturbation of the segment")


def tiles_meeting_rect(lo, hi, delaunay: DelaunayGraph) -> np.ndarray:
    """Vertices whose tile meets the axis-aligned rectangle [lo, hi].

    A tile meets the rectangle iff its generator is inside or the tile is
    crossed by the rectangle boundary.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    pts = delaunay.points
    inside = np.flatnonzero(np.all((pts >= lo) & (pts <= hi), axis=1))
    corners = [lo, np.array([hi[0], lo[1]]), hi, np.array([lo[0], hi[1]])]
    found = set(inside.tolist())
    for i in range(4):
        found.update(segment_path(corners[i], corners[(i + 1) % 4], delaunay).vertices)
    return np.array(sorted(found), dtype=np.int64)


@dataclass(frozen=True)
class EdgeCensus:
    n: float
    tiles: np.ndarray
    edges: np.ndarray

    @property
    def count(self) -> int:
        return len(self.edges)


def edge_census(n: float, delaunay: DelaunayGraph, voronoi=None) -> EdgeCensus:
    """Edges with an endpoint tile meeting some unit box centred on [0, n e1].

    The union of those boxes is the rectangle [-1/2, n+1/2] x [-1/2, 1/2],
    whether the centres range over the continuum segment or over integer
    points, so both readings give the same set for integer n.
    """
    tiles = tiles_meeting_rect((-0.5, -0.5), (n + 0.5, 0.5), delaunay)
    mask = np.zeros(delaunay.n_vertices, dtype=bool)
    mask[tiles] = True
    e = delaunay.edges
    sel = np.flatnonzero(mask[e[:, 0]] | mask[e[:, 1]])
    return EdgeCensus(float(n), tiles, sel)
