"""Passage times, first-passage distances, geodesics and geodesic trees."""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from fpplab import rng as rngmod
from fpplab.geometry.delaunay import DelaunayGraph, locate

# ----------------------------------------------------------------- laws

_FAMILIES = {
    "exponential": ("rate",),
    "uniform": ("low", "high"),
    "shifted_exponential": ("shift", "rate"),
    "gamma": ("shape", "scale"),
}
_HEAVY = {"pareto", "lognormal", "cauchy", "levy", "weibull_heavy", "student_t"}


@dataclass(frozen=True)
class PassageTimeLaw:
    """A continuous passage-time law with a finite exponential moment."""

    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family in _HEAVY:
            raise ValueError(
                f"{self.family!r} has no finite exponential moment E[exp(a tau)] for any a > 0; "
                "the shape theorem and geodesic estimates assume one"
            )
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown law family {self.family!r}; choose from {sorted(_FAMILIES)}")
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        if len(params) != len(_FAMILIES[self.family]):
            raise ValueError(f"{self.family} takes parameters {_FAMILIES[self.family]}")
        if self.family == "uniform":
            lo, hi = params
            if not 0 <= lo < hi:
                raise ValueError("uniform law needs 0 <= low < high")
        elif self.family == "shifted_exponential":
            if params[0] < 0 or params[1] <= 0:
                raise ValueError("shifted_exponential needs shift >= 0 and rate > 0")
        elif any(p <= 0 for p in params):
            raise ValueError(f"{self.family} parameters must be positive")

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "PassageTimeLaw":
        return cls("exponential", (rate,))

    @classmethod
    def uniform(cls, low: float, high: float) -> "PassageTimeLaw":
        return cls("uniform", (low, high))

    @property
    def mean(self) -> float:
        f, p = self.family, self.params
        if f == "exponential":
            return 1.0 / p[0]
        if f == "uniform":
            return 0.5 * (p[0] + p[1])
        if f == "shifted_exponential":
            return p[0] + 1.0 / p[1]
        return p[0] * p[1]

    def scaled(self, c: float) -> "PassageTimeLaw":
        """Law of ``c * tau``; samples from the same stream scale exactly."""
        f, p = self.family, self.params
        if f == "exponential":
            return PassageTimeLaw(f, (p[0] / c,))
        if f == "uniform":
            return PassageTimeLaw(f, (c * p[0], c * p[1]))
        if f == "shifted_exponential":
            return PassageTimeLaw(f, (c * p[0], p[1] / c))
        return PassageTimeLaw(f, (p[0], c * p[1]))

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        f, p = self.family, self.params
        if f == "exponential":
            return (1.0 / p[0]) * gen.standard_exponential(size)
        if f == "uniform":
            return p[0] + (p[1] - p[0]) * gen.random(size)
        if f == "shifted_exponential":
            return p[0] + (1.0 / p[1]) * gen.standard_exponential(size)
        return p[1] * gen.standard_gamma(p[0], size)

    def to_dict(self) -> dict:
        return {"family": self.family, "params": list(self.params)}


@dataclass(frozen=True, eq=False)
class EdgeWeights:
    """Passage time per Delaunay edge (indexed by edge id)."""

    values: np.ndarray
    law: PassageTimeLaw | None = None
    seed: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise ValueError("passage times must be finite and nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.values)

    def scaled(self, c: float) -> "EdgeWeights":
        return EdgeWeights(c * self.values, self.law.scaled(c) if self.law else None, self.seed)

    @property
    def all_distinct(self) -> bool:
        return len(np.unique(self.values)) == len(self.values)


def assign_weights(delaunay: DelaunayGraph, law: PassageTimeLaw, seed: int, replicate: int = 0) -> EdgeWeights:
    """i.i.d. passage times from the weights stream, independent of geometry."""
    gen = rngmod.stream(seed, rngmod.WEIGHTS, replicate)
    vals = law.sample(gen, delaunay.n_edges)
    return EdgeWeights(vals, law, rngmod.seed_record(seed, rngmod.WEIGHTS, replicate))


# ----------------------------------------------------------------- shortest paths


@njit(cache=True)
def _heap_push(keys, vals, size, k, v):
    i = size
    keys[i] = k
    vals[i] = v
    while i > 0:
        p = (i - 1) >> 1
        if keys[p] < keys[i] or (keys[p] == keys[i] and vals[p] <= vals[i]):
            break
        keys[p], keys[i] = keys[i], keys[p]
        vals[p], vals[i] = vals[i], vals[p]
        i = p
    return size + 1


@njit(cache=True)
def _heap_pop(keys, vals, size):
    k = keys[0]
    v = vals[0]
    size -= 1
    keys[0] = keys[size]
    vals[0] = vals[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        c = left
        r = left + 1
        if r < size and (keys[r] < keys[left] or (keys[r] == keys[left] and vals[r] < vals[left])):
            c = r
        if keys[i] < keys[c] or (keys[i] == keys[c] and vals[i] <= vals[c]):
            break
        keys[c], keys[i] = keys[i], keys[c]
        vals[c], vals[i] = vals[i], vals[c]
        i = c
    return k, v, size


@njit(cache=True)
def _dijkstra(adj_ptr, adj_index, adj_edge, weights, source):
    n = adj_ptr.size - 1
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, np.int64)
    pedge = np.full(n, -1, np.int64)
    done = np.zeros(n, np.bool_)
    keys = np.empty(adj_index.size + 1)
    vals = np.empty(adj_index.size + 1, np.int64)
    size = 0
    tie = False
    dist[source] = 0.0
    size = _heap_push(keys, vals, size, 0.0, source)
    while size > 0:
        d, u, size = _heap_pop(keys, vals, size)
        if done[u]:
            continue
        done[u] = True
        for p in range(adj_ptr[u], adj_ptr[u + 1]):
            v = adj_index[p]
            if done[v]:
                continue
            e = adj_edge[p]
            nd = d + weights[e]
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                pedge[v] = e
                size = _heap_push(keys, vals, size, nd, v)
            elif nd == dist[v]:
                tie = True
                if e < pedge[v]:
                    parent[v] = u
                    pedge[v] = e
    return dist, parent, pedge, tie


@dataclass(frozen=True, eq=False)
class FppField:
    """First-passage times from one source and the geodesic tree's parents."""

    source: int
    dist: np.ndarray
    parent: np.ndarray
    parent_edge: np.ndarray
    tie: bool = False

    def to_csv(self, points: np.ndarray) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["vertex", "x", "y", "dist", "parent"])
        for v in range(len(self.dist)):
            w.writerow([v, repr(float(points[v, 0])), repr(float(points[v, 1])), repr(float(self.dist[v])), int(self.parent[v])])
        return buf.getvalue()


class DisconnectedGraphError(ValueError):
    pass


def single_source(delaunay: DelaunayGraph, weights: EdgeWeights, source: int) -> FppField:
    """Exact first-passage times from ``source`` by label setting.

    Equal-time alternatives (impossible almost surely) keep the predecessor
    edge with the smallest id and set ``tie``.
    """
    if len(weights) != delaunay.n_edges:
        raise ValueError("weight count does not match edge count")
    dist, parent, pedge, tie = _dijkstra(delaunay.adj_ptr, delaunay.adj_index, delaunay.adj_edge, weights.values, int(source))
    if not np.all(np.isfinite(dist)):
        raise DisconnectedGraphError(f"{int(np.sum(~np.isfinite(dist)))} vertices unreachable from {source}")
    for a in (dist, parent, pedge):
        a.setflags(write=False)
    return FppField(int(source), dist, parent, pedge, bool(tie))


def geodesic(field: FppField, target: int) -> list[int]:
    """Vertex path from the source to ``target`` along parent pointers."""
    path = [int(target)]
    parent = field.parent
    while path[-1] != field.source:
        p = int(parent[path[-1]])
        if p < 0:
            raise ValueError(f"vertex {target} is not reachable from {field.source}")
        path.append(p)
    return path[::-1]


def passage_time(path, delaunay: DelaunayGraph, weights: EdgeWeights) -> float:
    """Sum of edge times along ``path`` accumulated from its first vertex."""
    t = 0.0
    for u, v in zip(path[:-1], path[1:]):
        t += weights.values[delaunay.edge_id(u, v)]
    return t


@dataclass(frozen=True, eq=False)
class GeodesicTree:
    """Children lists and preorder intervals of a shortest-path tree.

    ``subtree(u)`` is the set R_out(root, u): every vertex whose geodesic
    from the root passes through ``u``.
    """

    root: int
    parent: np.ndarray
    child_ptr: np.ndarray
    child_index: np.ndarray
    tin: np.ndarray
    tout: np.ndarray
    order: np.ndarray

    def children(self, v: int) -> np.ndarray:
        return self.child_index[self.child_ptr[v] : self.child_ptr[v + 1]]

    def subtree(self, v: int) -> np.ndarray:
        return np.sort(self.order[self.tin[v] : self.tout[v]])

    def in_subtree(self, v: int, w) -> np.ndarray:
        """True where ``w`` lies in the subtree rooted at ``v``."""
        t = self.tin[np.asarray(w)]
        return (t >= self.tin[v]) & (t < self.tout[v])


@njit(cache=True)
def _preorder(child_ptr, child_index, root, n):
    tin = np.full(n, -1, np.int64)
    tout = np.full(n, -1, np.int64)
    order = np.empty(n, np.int64)
    stack = np.empty(n, np.int64)
    pos = np.empty(n, np.int64)
    top = 0
    stack[0] = root
    pos[0] = child_ptr[root]
    clock = 0
    tin[root] = 0
    order[0] = root
    clock = 1
    while top >= 0:
        u = stack[top]
        if pos[top] < child_ptr[u + 1]:
            c = child_index[pos[top]]
            pos[top] += 1
            tin[c] = clock
            order[clock] = c
            clock += 1
            top += 1
            stack[top] = c
            pos[top] = child_ptr[c]
        else:
            tout[u] = clock
            top -= 1
    return tin, tout, order[:clock]


def geodesic_tree(field: FppField) -> GeodesicTree:
    parent = field.parent
    n = len(parent)
    has = parent >= 0
    kids = np.flatnonzero(has)
    srt = kids[np.argsort(parent[kids], kind="stable")]
    child_ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(child_ptr, parent[kids] + 1, 1)
    child_ptr = np.cumsum(child_ptr)
    tin, tout, order = _preorder(child_ptr, srt.astype(np.int64), field.source, n)
    return GeodesicTree(field.source, parent, child_ptr, srt, tin, tout, order)


def boundary_paths(tree: GeodesicTree, points: np.ndarray, half_width: float) -> list[list[int]]:
    """Root paths to every tree vertex that first leaves the square of the
    given half-width (centred at the origin).  These maximal in-window
    branches stand in for semi-infinite geodesics."""
    outside = np.max(np.abs(points), axis=1) > half_width
    par = tree.parent
    # clear[v]: every vertex on the root path to v lies inside
    clear = np.zeros(len(par), dtype=bool)
    clear[tree.root] = not outside[tree.root]
    for v in tree.order[1:]:
        clear[v] = clear[par[v]] and not outside[v]
    ends = np.flatnonzero(outside & (par >= 0))
    ends = ends[clear[par[ends]]]
    paths = []
    for v in ends:
        path = [int(v)]
        while path[-1] != tree.root:
            path.append(int(par[path[-1]]))
        paths.append(path[::-1])
    return paths


def count_ends(tree: GeodesicTree, points: np.ndarray, r_inner: float, r_outer: float) -> int:
    """Number of branches crossing radius ``r_inner`` that reach ``r_outer``.

    Radii are measured from the root; a finite-window proxy for the number
    of topological ends of the tree.
    """
    rad = np.hypot(*(points - points[tree.root]).T)
    par = tree.parent
    cross = np.flatnonzero((rad >= r_inner) & (par >= 0))
    cross = cross[rad[par[cross]] < r_inner]
    far = rad >= r_outer
    count = 0
    for c in cross:
        if far[tree.order[tree.tin[c] : tree.tout[c]]].any():
            count += 1
    return count


def graph_distance(delaunay: DelaunayGraph, A, B) -> int:
    """Hop distance between the tiles containing the points of A and of B."""
    a = np.atleast_1d(locate(np.asarray(A, dtype=float).reshape(-1, 2), delaunay))
    b = set(np.atleast_1d(locate(np.asarray(B, dtype=float).reshape(-1, 2), delaunay)).tolist())
    return hop_distance(delaunay, a, b)


def hop_distance(delaunay: DelaunayGraph, sources, targets) -> int:
    targets = set(int(t) for t in targets)
    seen = np.zeros(delaunay.n_vertices, dtype=bool)
    q = deque()
    for s in sources:
        if int(s) in targets:
            return 0
        seen[s] = True
        q.append((int(s), 0))
    ptr, idx = delaunay.adj_ptr, delaunay.adj_index
    while q:
        u, d = q.popleft()
        for w in idx[ptr[u] : ptr[u + 1]]:
            if not seen[w]:
                if int(w) in targets:
                    return d + 1
                seen[w] = True
                q.append((int(w), d + 1))
    raise DisconnectedGraphError("targets unreachable")
