"""Voronoi tessellation as the dual of a Delaunay triangulation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fpplab.geometry.delaunay import DelaunayGraph


@dataclass(frozen=True, eq=False)
class VoronoiTessellation:
    """Tiles indexed like the Delaunay vertices.

    ``tile_ptr``/``tile_index`` store, for each vertex, the counterclockwise
    cycle of triangles around it; their circumcenters are the tile corners.
    Hull vertices have unbounded tiles (``bounded`` is False) and their
    stored cycle is the open fan.  ``edge_vertices[e]`` holds the two
    Voronoi vertices dual to Delaunay edge ``e`` (-1 marks a ray).
    """

    delaunay: DelaunayGraph
    vertices: np.ndarray
    tile_ptr: np.ndarray
    tile_index: np.ndarray
    bounded: np.ndarray
    edge_vertices: np.ndarray

    def tile(self, v: int) -> np.ndarray:
        """Corner coordinates of the tile at ``v`` in counterclockwise order."""
        return self.vertices[self.tile_index[self.tile_ptr[v] : self.tile_ptr[v + 1]]]

    def interior_vertices(self) -> np.ndarray:
        """Vertices whose tile is bounded and lies inside the inner window."""
        win = self.delaunay.window
        ok = self.bounded.copy()
        if win is not None:
            corner_ok = win.in_inner(self.vertices)
            bad = np.zeros(len(ok), dtype=bool)
            owners = np.repeat(np.arange(len(ok)), np.diff(self.tile_ptr))
            np.logical_or.at(bad, owners, ~corner_ok[self.tile_index])
            ok &= ~bad
        return np.flatnonzero(ok)


def voronoi_dual(delaunay: DelaunayGraph) -> VoronoiTessellation:
    pts = delaunay.points
    tris = delaunay.triangles
    n = len(pts)
    owner = tris.ravel()
    tri_id = np.repeat(np.arange(len(tris)), 3)
    centroid = pts[tris].mean(axis=1)
    rel = centroid[tri_id] - pts[owner]
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    order = np.lexsort((ang, owner))
    owner, tri_id = owner[order], tri_id[order]
    tile_ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(tile_ptr, owner + 1, 1)
    tile_ptr = np.cumsum(tile_ptr)
    tile_index = tri_id.copy()

    # open fans around hull vertices must start after the angular gap
    for v in np.flatnonzero(delaunay.on_hull):
        seg = tile_index[tile_ptr[v] : tile_ptr[v + 1]]
        if len(seg) < 2:
            continue
        a = ang[order][tile_ptr[v] : tile_ptr[v + 1]]
        gaps = np.diff(np.concatenate([a, [a[0] + 2 * np.pi]]))
        start = (int(np.argmax(gaps)) + 1) % len(seg)
        tile_index[tile_ptr[v] : tile_ptr[v + 1]] = np.roll(seg, -start)

    for arr in (tile_ptr, tile_index):
        arr.setflags(write=False)
    bounded = ~delaunay.on_hull
    centers = delaunay.circumcenters
    return VoronoiTessellation(
        delaunay=delaunay,
        vertices=centers,
        tile_ptr=tile_ptr,
        tile_index=tile_index,
        bounded=bounded,
        edge_vertices=delaunay.edge_triangles,
    )


def polygon_is_convex(poly: np.ndarray, tol: float = 1e-9) -> bool:
    """Counterclockwise convexity by the sign of consecutive cross products."""
    if len(poly) < 3:
        return False
    d1 = np.roll(poly, -1, axis=0) - poly
    d2 = np.roll(d1, -1, axis=0)
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    scale = max(np.abs(poly).max(), 1.0) ** 2
    return bool(np.all(cross >= -tol * scale))
