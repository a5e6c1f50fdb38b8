"""Competing first-passage growth from k seeds and its interface.

Species are numbered 0..k-1 in seed order.  A vertex belongs to the seed
with the smallest first-passage time; exact ties go to the smaller index.
When several seeds fall in one tile only the first is grown and the others
own nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fpplab.fpp import EdgeWeights, FppField, single_source
from fpplab.geometry.delaunay import DelaunayGraph, locate
from fpplab.geometry.voronoi import VoronoiTessellation
from fpplab.geometry.window import SimWindow


class InsufficientBranchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SeedSet:
    points: np.ndarray
    layout: str = "free"
    radius: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if len(pts) < 1:
            raise ValueError("need at least one seed")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("seeds must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    @property
    def k(self) -> int:
        return len(self.points)

    @classmethod
    def regular_polygon(cls, k: int, r: float) -> "SeedSet":
        """Vertices of a regular k-gon of radius r, the first at (0, r)."""
        ang = np.pi / 2 + 2 * np.pi * np.arange(k) / k
        pts = r * np.column_stack([np.cos(ang), np.sin(ang)])
        if k >= 1:
            pts[0] = (0.0, r)
        return cls(pts, "polygon", float(r))

    def axis_angles(self) -> np.ndarray:
        return np.mod(np.arctan2(self.points[:, 1], self.points[:, 0]), 2 * np.pi)


@dataclass(frozen=True, eq=False)
class CompetitionLabeling:
    label: np.ndarray
    arrival: np.ndarray
    seed_vertices: np.ndarray
    collided: np.ndarray
    tie: np.ndarray
    fields: list = field(default_factory=list, repr=False)

    @property
    def k(self) -> int:
        return len(self.seed_vertices)


def compete(delaunay: DelaunayGraph, weights: EdgeWeights, seeds: SeedSet) -> CompetitionLabeling:
    sv = np.atleast_1d(locate(seeds.points, delaunay))
    k = len(sv)
    collided = np.array([sv[j] in sv[:j] for j in range(k)], dtype=bool)
    fields: list[FppField | None] = []
    times = np.full((k, delaunay.n_vertices), np.inf)
    for j in range(k):
        if collided[j]:
            fields.append(None)
            continue
        f = single_source(delaunay, weights, int(sv[j]))
        fields.append(f)
        times[j] = f.dist
    label = np.argmin(times, axis=0)
    arrival = times[label, np.arange(delaunay.n_vertices)]
    tie = np.sum(times == arrival, axis=0) > 1
    return CompetitionLabeling(label, arrival, sv, collided, tie, fields)


# ----------------------------------------------------------------- interface


@dataclass(frozen=True, eq=False)
class Branch:
    """A self-avoiding chain of interface Voronoi vertices.

    ``vertices`` are Voronoi vertex (triangle) ids and ``edges`` the dual
    Delaunay edge ids, ``len(edges) == len(vertices) - 1`` unless ``closed``.
    Open branches that reach the hull are oriented to end there.
    """

    vertices: list[int]
    edges: list[int]
    species: tuple[int, int]
    boundary_end: bool
    closed: bool = False


@dataclass(frozen=True, eq=False)
class InterfaceGraph:
    edges: np.ndarray
    degree: dict
    branches: list[Branch]


def interface_edges(labeling: CompetitionLabeling, delaunay: DelaunayGraph) -> np.ndarray:
    """Delaunay edges with differently labelled ends and a finite dual edge."""
    e = delaunay.edges
    lab = labeling.label
    finite = delaunay.edge_triangles[:, 1] >= 0
    return np.flatnonzero((lab[e[:, 0]] != lab[e[:, 1]]) & finite)


def extract_interface(labeling: CompetitionLabeling, voronoi: VoronoiTessellation, split_at=(0.0, 0.0)) -> InterfaceGraph:
    delaunay = voronoi.delaunay
    ids = interface_edges(labeling, delaunay)
    branches = trace_branches(ids, labeling, voronoi, split_at)
    ends = delaunay.edge_triangles[ids]
    deg: dict[int, int] = {}
    for a, b in ends:
        deg[int(a)] = deg.get(int(a), 0) + 1
        deg[int(b)] = deg.get(int(b), 0) + 1
    return InterfaceGraph(ids, deg, branches)


def trace_branches(edge_ids, labeling: CompetitionLabeling, voronoi: VoronoiTessellation, split_at=(0.0, 0.0)) -> list[Branch]:
    """Decompose the interface into branches.

    Chains run between vertices of interface degree other than 2 (junctions
    of three species, or the hull).  A chain with both ends on the hull is
    cut at its vertex nearest ``split_at`` into two outward branches.
    Remaining cycles are returned as closed branches.
    """
    delaunay = voronoi.delaunay
    et = delaunay.edge_triangles
    inc: dict[int, list[tuple[int, int]]] = {}
    for e in map(int, edge_ids):
        a, b = int(et[e, 0]), int(et[e, 1])
        inc.setdefault(a, []).append((b, e))
        inc.setdefault(b, []).append((a, e))
    for lst in inc.values():
        lst.sort()
    used: set[int] = set()
    pts = voronoi.vertices
    lab = labeling.label
    E = delaunay.edges

    def species(e: int) -> tuple[int, int]:
        a, b = sorted((int(lab[E[e, 0]]), int(lab[E[e, 1]])))
        return a, b

    chains = []
    for start in sorted(v for v, lst in inc.items() if len(lst) != 2):
        for nxt, e in inc[start]:
            if e in used:
                continue
            verts, edges = [start], []
            cur, ce = nxt, e
            while True:
                used.add(ce)
                edges.append(ce)
                verts.append(cur)
                if len(inc[cur]) != 2:
                    break
                (n1, e1), (n2, e2) = inc[cur]
                cur, ce = (n1, e1) if e2 == ce else (n2, e2)
            chains.append((verts, edges, False))
    for start in sorted(inc):
        for nxt, e in inc[start]:
            if e in used:
                continue
            verts, edges = [start], []
            cur, ce = nxt, e
            while True:
                used.add(ce)
                edges.append(ce)
                if cur == start:
                    break
                verts.append(cur)
                (n1, e1), (n2, e2) = inc[cur]
                cur, ce = (n1, e1) if e2 == ce else (n2, e2)
            chains.append((verts, edges, True))

    split_at = np.asarray(split_at, dtype=float)
    out = []
    for verts, edges, closed in chains:
        sp = species(edges[0])
        if closed:
            out.append(Branch(verts, edges, sp, False, True))
            continue
        head_b = len(inc[verts[0]]) == 1
        tail_b = len(inc[verts[-1]]) == 1
        if head_b and tail_b:
            d = np.hypot(*(pts[verts] - split_at).T)
            c = int(np.argmin(d))
            if c == 0:
                out.append(Branch(verts, edges, sp, True))
            elif c == len(verts) - 1:
                out.append(Branch(verts[::-1], edges[::-1], sp, True))
            else:
                out.append(Branch(verts[c::-1], edges[c - 1 :: -1], sp, True))
                out.append(Branch(verts[c:], edges[c:], sp, True))
        elif head_b:
            out.append(Branch(verts[::-1], edges[::-1], sp, True))
        else:
            out.append(Branch(verts, edges, sp, tail_b))
    return out


# ----------------------------------------------------------------- directions


def ang(x, y) -> np.ndarray:
    """Angle in [0, pi] between planar vectors (row-wise)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    cross = x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0]
    dot = x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1]
    return np.abs(np.arctan2(cross, dot))


def fit_exponent(radius: np.ndarray, angle: np.ndarray) -> float:
    """Least-squares slope of log(angle) against log(radius)."""
    ok = (angle > 0) & (radius > 0)
    if ok.sum() < 3:
        return float("nan")
    return float(np.polyfit(np.log(radius[ok]), np.log(angle[ok]), 1)[0])


@dataclass(frozen=True)
class BranchDirection:
    theta: float
    radius: np.ndarray
    angle: np.ndarray
    exponent: float
    n_used: int


def estimate_direction(points: np.ndarray, window: SimWindow, min_vertices: int = 20) -> BranchDirection:
    """Asymptotic direction of an outward-oriented polygonal branch.

    The branch is cut where it first leaves the inner window.  The direction
    is the circular mean of ``x_n / |x_n|`` over the outer half (by arc
    length) of what remains; the straightness samples are the angles to
    that direction for vertices beyond radius R/4.
    """
    pts = np.asarray(points, dtype=float)
    inner = window.in_inner(pts)
    if inner.all():
        raise InsufficientBranchError("branch does not cross the inner-window boundary")
    pts = pts[: int(np.argmax(~inner))]
    rad = np.hypot(pts[:, 0], pts[:, 1])
    far = rad >= window.half_width / 4
    if far.sum() < min_vertices:
        raise InsufficientBranchError(f"only {int(far.sum())} vertices beyond radius R/4")
    seg = np.hypot(*np.diff(pts, axis=0).T)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    outer = arc >= arc[-1] / 2
    u = pts[outer] / rad[outer, None]
    m = u.mean(axis=0)
    theta = float(np.mod(np.arctan2(m[1], m[0]), 2 * np.pi))
    e = np.array([np.cos(theta), np.sin(theta)])
    a = ang(pts[far], e)
    return BranchDirection(theta, rad[far], a, fit_exponent(rad[far], a), int(far.sum()))


def branch_points(branch: Branch, voronoi: VoronoiTessellation) -> np.ndarray:
    return voronoi.vertices[branch.vertices]


# ----------------------------------------------------------------- coverage


def probe_radius(window: SimWindow) -> float:
    """Radius of the outermost circle inside the inner window."""
    return window.inner_half_width


def sector_coverage(
    labeling: CompetitionLabeling,
    seeds: SeedSet,
    eps: float,
    delaunay: DelaunayGraph,
    window: SimWindow,
    spacing: float = np.deg2rad(1.0),
) -> np.ndarray:
    """Per species: does it own the outermost probe tile in every direction
    within ``pi/k - eps`` of its seed axis?"""
    k = seeds.k
    half = np.pi / k - eps
    m = int(np.floor(half / spacing + 1e-9))
    offsets = spacing * np.arange(-m, m + 1)
    rho = probe_radius(window)
    out = np.zeros(k, dtype=bool)
    for j, phi in enumerate(seeds.axis_angles()):
        if labeling.collided[j]:
            continue
        beta = phi + offsets
        probes = rho * np.column_stack([np.cos(beta), np.sin(beta)])
        out[j] = bool(np.all(labeling.label[locate(probes, delaunay)] == j))
    return out


def coexistence(
    labeling: CompetitionLabeling, delaunay: DelaunayGraph, window: SimWindow, spacing: float = np.deg2rad(1.0)
) -> np.ndarray:
    """Per species: does it own a tile in the outer annulus of the inner window?

    The annulus spans radii [(1 - 2b) R, (1 - b) R]; a species survives if
    it owns a vertex there or the probe tile of some ray on its outer circle.
    """
    rho = probe_radius(window)
    rin = rho - window.buffer_width
    rad = np.hypot(delaunay.points[:, 0], delaunay.points[:, 1])
    ring = (rad >= rin) & (rad <= rho)
    beta = spacing * np.arange(int(round(2 * np.pi / spacing)))
    probes = rho * np.column_stack([np.cos(beta), np.sin(beta)])
    owners = np.concatenate([labeling.label[ring], labeling.label[locate(probes, delaunay)]])
    alive = np.zeros(labeling.k, dtype=bool)
    alive[np.unique(owners)] = True
    alive &= ~labeling.collided
    return alive
