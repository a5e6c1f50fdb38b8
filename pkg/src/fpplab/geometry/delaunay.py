"""Delaunay triangulation of a planar point set with exact predicates.

Two builders produce the same triangulation (the one determined by the
exact in-circle test with index-ordered symbolic perturbation):

* ``"incremental"``: Bowyer-Watson insertion with ghost triangles for the
  convex hull and a visibility walk for point location.  Pure Python,
  intended for small inputs and as a reference.
* ``"qhull"``: Qhull's triangulation, then certified edge by edge with the
  exact in-circle test and repaired with Lawson flips where needed.

``"auto"`` uses Qhull and falls back to the incremental builder whenever
Qhull drops points or emits a non-positive triangle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay as _QhullDelaunay, cKDTree

from fpplab.geometry.predicates import incircle_batch, incircle_sos, orient, orient_batch
from fpplab.geometry.window import DegenerateConfigurationError, OutsideWindowError, PointSet, SimWindow

GHOST = -1


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DelaunayGraph:
    """Immutable triangulation with adjacency in CSR form.

    ``edges`` are sorted lexicographically with ``edges[:, 0] < edges[:, 1]``,
    so edge ids coincide with lexicographic order.  ``adj_edge[p]`` is the id
    of the edge ``(v, adj_index[p])`` for ``p`` in ``adj_ptr[v]:adj_ptr[v+1]``.
    ``tri_neighbors[t, k]`` is the triangle across the edge opposite corner
    ``k`` of triangle ``t`` (-1 on the hull).
    """

    points: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    adj_ptr: np.ndarray
    adj_index: np.ndarray
    adj_edge: np.ndarray
    tri_neighbors: np.ndarray
    edge_triangles: np.ndarray
    circumcenters: np.ndarray
    circumradii: np.ndarray
    on_hull: np.ndarray
    window: SimWindow | None = None
    _tree: cKDTree | None = field(default=None, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> np.ndarray:
        return self.adj_index[self.adj_ptr[v] : self.adj_ptr[v + 1]]

    def edge_id(self, u: int, v: int) -> int:
        nbrs = self.neighbors(u)
        hit = np.flatnonzero(nbrs == v)
        if len(hit) == 0:
            raise KeyError(f"({u}, {v}) is not a Delaunay edge")
        return int(self.adj_edge[self.adj_ptr[u] + hit[0]])

    @property
    def kdtree(self) -> cKDTree:
        if self._tree is None:
            object.__setattr__(self, "_tree", cKDTree(self.points))
        return self._tree


# ---------------------------------------------------------------- incremental


def _between(a, b, p) -> bool:
    # p is known collinear with a, b
    if a[0] != b[0]:
        return min(a[0], b[0]) < p[0] < max(a[0], b[0])
    return min(a[1], b[1]) < p[1] < max(a[1], b[1])


class _Incremental:
    def __init__(self, pts: np.ndarray):
        self.p = [tuple(map(float, q)) for q in pts]
        self.tris: dict[int, tuple[int, int, int]] = {}
        self.edge: dict[tuple[int, int], int] = {}
        self.next_id = 0
        self.last = -1

    def _add(self, a: int, b: int, c: int) -> int:
        if a == GHOST:
            a, b, c = b, c, a
        elif b == GHOST:
            a, b, c = c, a, b
        t = self.next_id
        self.next_id += 1
        self.tris[t] = (a, b, c)
        self.edge[(a, b)] = t
        self.edge[(b, c)] = t
        self.edge[(c, a)] = t
        if c != GHOST:
            self.last = t
        return t

    def _remove(self, t: int) -> None:
        a, b, c = self.tris.pop(t)
        for e in ((a, b), (b, c), (c, a)):
            if self.edge.get(e) == t:
                del self.edge[e]

    def _conflict(self, t: int, i: int) -> bool:
        a, b, c = self.tris[t]
        p = self.p
        if c == GHOST:
            o = orient(p[a], p[b], p[i])
            return o > 0 or (o == 0 and _between(p[a], p[b], p[i]))
        return incircle_sos(p[a], p[b], p[c], p[i], a, b, c, i) > 0

    def _walk(self, i: int) -> int:
        p = self.p
        t = self.last
        for _ in range(4 * len(self.tris) + 10):
            a, b, c = self.tris[t]
            moved = False
            for u, v in ((a, b), (b, c), (c, a)):
                if orient(p[u], p[v], p[i]) < 0:
                    t = self.edge[(v, u)]
                    moved = True
                    break
            if not moved or self.tris[t][2] == GHOST:
                return t
        for t in self.tris:  # pathological fallback
            if self._conflict(t, i):
                return t
        raise RuntimeError("point location failed")

    def insert(self, i: int) -> None:
        start = self._walk(i)
        if self.tris[start][2] != GHOST:
            if i in self.tris[start] or any(self.p[v] == self.p[i] for v in self.tris[start]):
                raise DegenerateConfigurationError(f"duplicate point at index {i}")
        cavity = {start}
        tested = {start: True}
        stack = [start]
        boundary = []
        while stack:
            t = stack.pop()
            a, b, c = self.tris[t]
            for u, v in ((a, b), (b, c), (c, a)):
                nb = self.edge[(v, u)]
                if nb not in tested:
                    tested[nb] = self._conflict(nb, i)
                    if tested[nb]:
                        cavity.add(nb)
                        stack.append(nb)
                if not tested[nb]:
                    boundary.append((u, v))
        for t in cavity:
            self._remove(t)
        for u, v in boundary:
            self._add(u, v, i)

    def run(self) -> np.ndarray:
        p = self.p
        n = len(p)
        k = next((k for k in range(2, n) if orient(p[0], p[1], p[k]) != 0), None)
        if k is None:
            raise DegenerateConfigurationError("all points are collinear")
        a, b, c = (0, 1, k) if orient(p[0], p[1], p[k]) > 0 else (1, 0, k)
        self._add(a, b, c)
        for u, v in ((a, b), (b, c), (c, a)):
            self._add(v, u, GHOST)
        self.last = 0
        for i in range(2, n):
            if i != k:
                self.insert(i)
        real = [t for t in self.tris.values() if t[2] != GHOST]
        return np.array(real, dtype=np.int64).reshape(-1, 3)


# ---------------------------------------------------------------- qhull + lawson


def _directed_match(tris: np.ndarray, n: int):
    """For each (triangle, corner) find the triangle across the opposite edge."""
    m = len(tris)
    # edge opposite corner k runs tris[k+1] -> tris[k+2]
    src = np.stack([tris[:, 1], tris[:, 2], tris[:, 0]], axis=1).ravel()
    dst = np.stack([tris[:, 2], tris[:, 0], tris[:, 1]], axis=1).ravel()
    key = src * n + dst
    rkey = dst * n + src
    order = np.argsort(key)
    pos = np.searchsorted(key[order], rkey)
    pos = np.minimum(pos, len(key) - 1)
    hit = key[order][pos] == rkey
    nbr = np.where(hit, order[pos] // 3, -1)
    return nbr.reshape(m, 3)


def _legalize(pts: np.ndarray, tris: np.ndarray, nbr: np.ndarray) -> tuple[np.ndarray, int]:
    """Make every interior edge locally Delaunay under the exact SoS test."""
    t_idx, corner = np.nonzero(nbr >= 0)
    keep = t_idx < nbr[t_idx, corner]
    t_idx, corner = t_idx[keep], corner[keep]
    o_tri = nbr[t_idx, corner]
    a = tris[t_idx, (corner + 1) % 3]
    b = tris[t_idx, (corner + 2) % 3]
    c = tris[t_idx, corner]
    # the vertex of o_tri not on edge (a, b)
    ot = tris[o_tri]
    d = np.where((ot[:, 0] != a) & (ot[:, 0] != b), ot[:, 0], np.where((ot[:, 1] != a) & (ot[:, 1] != b), ot[:, 1], ot[:, 2]))
    det, unsure = incircle_batch(pts[a], pts[b], pts[c], pts[d])
    bad = (det > 0) & ~unsure
    for i in np.flatnonzero(unsure):
        if incircle_sos(pts[a[i]], pts[b[i]], pts[c[i]], pts[d[i]], a[i], b[i], c[i], d[i]) > 0:
            bad[i] = True
    if not bad.any():
        return tris, 0
    return _lawson(pts, tris)


def _lawson(pts: np.ndarray, tris: np.ndarray) -> tuple[np.ndarray, int]:
    P = [tuple(q) for q in pts]
    T = {i: tuple(int(v) for v in t) for i, t in enumerate(tris)}
    E = {}
    for i, (a, b, c) in T.items():
        E[(a, b)] = i
        E[(b, c)] = i
        E[(c, a)] = i
    stack = list(E.keys())
    flips = 0
    while stack:
        a, b = stack.pop()
        t1 = E.get((a, b))
        t2 = E.get((b, a))
        if t1 is None or t2 is None:
            continue
        c = next(v for v in T[t1] if v != a and v != b)
        d = next(v for v in T[t2] if v != a and v != b)
        if incircle_sos(P[a], P[b], P[c], P[d], a, b, c, d) <= 0:
            continue
        # replace ab by cd; triangles (a,b,c),(b,a,d) -> (c,a,d),(d,b,c)
        for t in (t1, t2):
            x, y, z = T.pop(t)
            for e in ((x, y), (y, z), (z, x)):
                del E[e]
        for t, tri in ((t1, (c, a, d)), (t2, (d, b, c))):
            T[t] = tri
            x, y, z = tri
            E[(x, y)] = t
            E[(y, z)] = t
            E[(z, x)] = t
        flips += 1
        stack.extend([(a, d), (d, b), (b, c), (c, a)])
    return np.array(list(T.values()), dtype=np.int64), flips


def _qhull(pts: np.ndarray) -> np.ndarray | None:
    try:
        q = _QhullDelaunay(pts)
    except Exception:
        return None
    if len(q.coplanar) or np.bincount(q.simplices.ravel(), minlength=len(pts)).min() == 0:
        return None
    tris = q.simplices.astype(np.int64)
    o = orient_batch(pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]])
    if (o == 0).any():
        return None
    flip = o < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return tris


# ---------------------------------------------------------------- assembly


def _circumcenters(pts: np.ndarray, tris: np.ndarray):
    a, b, c = pts[tris[:, 0]], pts[tris[:, 1]], pts[tris[:, 2]]
    bx, by = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    cx, cy = c[:, 0] - a[:, 0], c[:, 1] - a[:, 1]
    d = 2.0 * (bx * cy - by * cx)
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    centers = np.column_stack([a[:, 0] + ux, a[:, 1] + uy])
    return centers, np.hypot(ux, uy)


def _canonical(tris: np.ndarray) -> np.ndarray:
    # rotate the smallest index first, then sort rows
    rot = np.argmin(tris, axis=1)
    tris = np.stack([tris[np.arange(len(tris)), (rot + k) % 3] for k in range(3)], axis=1)
    return tris[np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0]))]


def _assemble(pts: np.ndarray, tris: np.ndarray, window: SimWindow | None, certify: bool) -> DelaunayGraph:
    n = len(pts)
    tris = _canonical(tris)
    nbr = _directed_match(tris, n)
    if certify:
        tris, flips = _legalize(pts, tris, nbr)
        if flips:
            tris = _canonical(tris)
            nbr = _directed_match(tris, n)

    und = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    ukey = np.unique(np.minimum(und[:, 0], und[:, 1]) * n + np.maximum(und[:, 0], und[:, 1]))
    edges = np.column_stack([ukey // n, ukey % n])
    if len(edges) > max(3 * n - 6, 3):
        raise AssertionError("Euler bound violated")

    # triangles on either side of each edge (second is -1 on the hull)
    key = edges[:, 0] * n + edges[:, 1]
    corner_edge = np.stack(
        [np.sort(tris[:, [1, 2]], axis=1), np.sort(tris[:, [2, 0]], axis=1), np.sort(tris[:, [0, 1]], axis=1)], axis=1
    )
    ck = (corner_edge[..., 0] * n + corner_edge[..., 1]).ravel()
    eid = np.searchsorted(key, ck)
    tri_of = np.repeat(np.arange(len(tris)), 3)
    edge_triangles = np.full((len(edges), 2), -1, dtype=np.int64)
    order = np.argsort(eid, kind="stable")
    se, st = eid[order], tri_of[order]
    first = np.ones(len(se), dtype=bool)
    first[1:] = se[1:] != se[:-1]
    edge_triangles[se[first], 0] = st[first]
    edge_triangles[se[~first], 1] = st[~first]

    both = np.concatenate([edges, edges[:, ::-1]])
    ids = np.concatenate([np.arange(len(edges)), np.arange(len(edges))])
    order = np.lexsort((both[:, 1], both[:, 0]))
    both, ids = both[order], ids[order]
    adj_ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(adj_ptr, both[:, 0] + 1, 1)
    adj_ptr = np.cumsum(adj_ptr)

    on_hull = np.zeros(n, dtype=bool)
    hull_edges = edges[edge_triangles[:, 1] < 0]
    on_hull[hull_edges.ravel()] = True

    centers, radii = _circumcenters(pts, tris)
    return DelaunayGraph(
        points=_frozen(pts),
        triangles=_frozen(tris),
        edges=_frozen(edges),
        adj_ptr=_frozen(adj_ptr),
        adj_index=_frozen(both[:, 1].astype(np.int64)),
        adj_edge=_frozen(ids.astype(np.int64)),
        tri_neighbors=_frozen(nbr),
        edge_triangles=_frozen(edge_triangles),
        circumcenters=_frozen(centers),
        circumradii=_frozen(radii),
        on_hull=_frozen(on_hull),
        window=window,
    )


def build_delaunay(points: PointSet | np.ndarray, method: str = "auto") -> DelaunayGraph:
    """Triangulate ``points``; raises DegenerateConfigurationError on
    fewer than three points, duplicates, or an all-collinear input."""
    window = points.window if isinstance(points, PointSet) else None
    pts = np.ascontiguousarray(points.points if isinstance(points, PointSet) else points, dtype=float)
    if len(pts) < 3:
        raise DegenerateConfigurationError(f"need at least 3 points, got {len(pts)}")
    srt = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    if np.any(np.all(srt[1:] == srt[:-1], axis=1)):
        raise DegenerateConfigurationError("duplicate points")
    if method not in ("auto", "qhull", "incremental"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "qhull"):
        tris = _qhull(pts)
        if tris is not None:
            return _assemble(pts, tris, window, certify=True)
        if method == "qhull":
            raise DegenerateConfigurationError("qhull could not triangulate every point")
    return _assemble(pts, _Incremental(pts).run(), window, certify=False)


def locate(x, delaunay: DelaunayGraph) -> int | np.ndarray:
    """Index of the nearest vertex (the tile containing ``x``).

    Ties go to the smallest index.  Accepts a single point or an (m, 2) array.
    """
    q = np.asarray(x, dtype=float)
    single = q.ndim == 1
    q = q.reshape(-1, 2)
    win = delaunay.window
    if win is not None and not np.all(win.contains(q)):
        bad = q[~win.contains(q)][0]
        raise OutsideWindowError(f"point {tuple(bad)} lies outside the window of half-width {win.half_width}")
    k = min(4, delaunay.n_vertices)
    d, idx = delaunay.kdtree.query(q, k=k)
    d, idx = d.reshape(len(q), k), idx.reshape(len(q), k)
    out = idx[:, 0].copy()
    tied = d[:, 1] == d[:, 0] if k > 1 else np.zeros(len(q), bool)
    for i in np.flatnonzero(tied):
        # exact squared distances to settle the tie
        cand = np.flatnonzero(np.sum((delaunay.points - q[i]) ** 2, axis=1) == np.min(np.sum((delaunay.points - q[i]) ** 2, axis=1)))
        out[i] = cand.min()
    return int(out[0]) if single else out
