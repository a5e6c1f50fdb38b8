import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import (
    empty_circumcircle_violations,
    incircle_fraction,
    nearest_scan,
    orient_fraction,
    voronoi_neighbor_pairs,
)

from conftest import random_points
from fpplab.geometry import (
    DegenerateConfigurationError,
    OutsideWindowError,
    PointSet,
    SimWindow,
    build_delaunay,
    circuit_confinement_audit,
    edge_census,
    enclosing_circuit,
    full_box_grid,
    full_probability,
    locate,
    polygon_is_convex,
    read_points_csv,
    sample_poisson,
    segment_path,
    tiles_meeting_rect,
    voronoi_dual,
    write_points_csv,
)
from fpplab.geometry.predicates import incircle, incircle_sos, orient

coord = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)


# ----------------------------------------------------------------- predicates


@given(point, point, point)
def test_orient_matches_rational_arithmetic(a, b, c):
    assert orient(a, b, c) == orient_fraction(a, b, c)


@given(point, point, point, point)
def test_incircle_matches_rational_arithmetic(a, b, c, d):
    s = orient_fraction(a, b, c)
    if s == 0:
        return
    if s < 0:
        b, c = c, b
    assert incircle(a, b, c, d) == incircle_fraction(a, b, c, d)


def test_orient_near_collinear_is_exact():
    # classic failure case for naive floating point
    a, b = (0.5, 0.5), (12.0, 12.0)
    for i in range(64):
        c = (24.0 + i * 2.0**-48, 24.0)
        assert orient(a, b, c) == orient_fraction(a, b, c)


def test_incircle_sos_never_zero_on_cocircular_square():
    sq = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    assert incircle(*sq) == 0
    s = incircle_sos(*sq, 0, 1, 2, 3)
    assert s in (-1, 1)
    # the same quadruple presented with the same indices gives the same answer
    assert incircle_sos(*sq, 0, 1, 2, 3) == s


# ----------------------------------------------------------------- window / sampling


def test_window_invariants():
    w = SimWindow(10.0, 0.2)
    assert w.inner_half_width == pytest.approx(8.0)
    assert w.area == 400.0
    for bad in (dict(half_width=0.0), dict(half_width=1.0, buffer_fraction=1.0)):
        with pytest.raises(ValueError):
            SimWindow(**bad)


def test_poisson_count_matches_intensity():
    pts = sample_poisson(SimWindow(50.0), 1.0, 11)
    # 10000 expected, Poisson sd 100
    assert abs(len(pts) - 10000) < 500
    assert np.all(SimWindow(50.0).contains(pts.points))


def test_poisson_empty_draw_is_degenerate():
    with pytest.raises(DegenerateConfigurationError):
        sample_poisson(SimWindow(1.0), 1e-9, 3)


def test_poisson_is_deterministic():
    a = sample_poisson(SimWindow(10.0), 1.0, 5, 2)
    b = sample_poisson(SimWindow(10.0), 1.0, 5, 2)
    assert a.points.tobytes() == b.points.tobytes()
    c = sample_poisson(SimWindow(10.0), 1.0, 5, 3)
    assert len(c) != len(a) or not np.array_equal(a.points, c.points)


def test_points_csv_round_trip(tmp_path):
    a = sample_poisson(SimWindow(5.0), 1.0, 4)
    write_points_csv(a, tmp_path / "p.csv")
    b = read_points_csv(tmp_path / "p.csv")
    assert np.array_equal(a.points, b.points)
    assert b.window.half_width == 5.0 and b.intensity == 1.0 and b.seed == a.seed


# ----------------------------------------------------------------- delaunay


def test_three_points_one_triangle():
    d = build_delaunay(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert len(d.triangles) == 1 and len(d.edges) == 3


def test_four_convex_points_pick_the_delaunay_diagonal():
    pts = np.array([[0.0, 0.0], [4.0, 0.0], [4.2, 1.0], [0.0, 1.5]])
    d = build_delaunay(pts)
    assert len(d.triangles) == 2 and len(d.edges) == 5
    diag = {tuple(e) for e in d.edges.tolist()} & {(0, 2), (1, 3)}
    assert len(diag) == 1
    (u, v) = diag.pop()
    others = [i for i in range(4) if i not in (u, v)]
    # the chosen diagonal keeps the opposite vertex outside each circumcircle
    for t in d.triangles:
        rest = [i for i in range(4) if i not in t]
        a, b, c = pts[t]
        if orient_fraction(a, b, c) < 0:
            b, c = c, b
        assert incircle_fraction(a, b, c, pts[rest[0]]) <= 0
    assert set(others) | {u, v} == {0, 1, 2, 3}


@pytest.mark.parametrize("bad", [np.zeros((2, 2)), np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])])
def test_degenerate_inputs_rejected(bad):
    with pytest.raises(DegenerateConfigurationError):
        build_delaunay(bad)


def test_duplicates_rejected():
    with pytest.raises(DegenerateConfigurationError):
        build_delaunay(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]))


@pytest.mark.parametrize("seed", range(3))
def test_thousand_points_empty_circumcircle(seed):
    pts = random_points(1000, seed)
    d = build_delaunay(pts)
    assert empty_circumcircle_violations(pts, d.triangles) == 0
    assert len(d.edges) <= 3 * len(pts) - 6


def test_builders_agree_on_cocircular_grid():
    g = np.array([(i, j) for i in range(5) for j in range(5)], dtype=float)
    a = build_delaunay(g, method="incremental")
    b = build_delaunay(g, method="auto")
    assert np.array_equal(a.triangles, b.triangles)
    assert empty_circumcircle_violations(g, a.triangles) == 0


@given(st.integers(0, 10_000), st.integers(4, 60))
def test_result_independent_of_input_order(seed, n):
    pts = random_points(n, seed)
    perm = np.random.default_rng(seed + 1).permutation(n)
    a = build_delaunay(pts)
    b = build_delaunay(pts[perm])
    relabel = np.sort(perm[b.edges], axis=1)
    assert {tuple(e) for e in a.edges.tolist()} == {tuple(e) for e in relabel.tolist()}


@given(st.integers(0, 10_000), st.integers(3, 80))
def test_incremental_and_qhull_paths_agree(seed, n):
    pts = random_points(n, seed)
    try:
        a = build_delaunay(pts, method="incremental")
    except DegenerateConfigurationError:
        return
    b = build_delaunay(pts, method="auto")
    assert np.array_equal(a.triangles, b.triangles)


def test_graph_invariants(config_20):
    d = config_20.delaunay
    n = d.n_vertices
    assert len(d.edges) <= 3 * n - 6
    # connected: breadth-first from vertex 0 reaches all
    seen = np.zeros(n, bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        nxt = []
        for v in frontier:
            for w in d.neighbors(v):
                if not seen[w]:
                    seen[w] = True
                    nxt.append(int(w))
        frontier = nxt
    assert seen.all()
    # Euler characteristic of a triangulated disc: V - E + F = 1
    assert n - len(d.edges) + len(d.triangles) == 1


def test_edge_id_lookup(config_20):
    d = config_20.delaunay
    for e in range(0, len(d.edges), 37):
        u, v = d.edges[e]
        assert d.edge_id(u, v) == e == d.edge_id(v, u)


# ----------------------------------------------------------------- voronoi


def test_three_point_voronoi():
    d = build_delaunay(np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]))
    vor = voronoi_dual(d)
    assert len(vor.vertices) == 1
    assert np.allclose(vor.vertices[0], [1.0, 1.0])
    assert not vor.bounded.any()


@pytest.mark.parametrize("seed", range(2))
def test_interior_tiles_convex(seed):
    pts = random_points(1000, seed)
    vor = voronoi_dual(build_delaunay(pts))
    for v in np.flatnonzero(vor.bounded):
        assert polygon_is_convex(vor.tile(v))


def test_duality_against_bisector_oracle():
    pts = random_points(200, 42)
    d = build_delaunay(pts)
    assert voronoi_neighbor_pairs(pts) == {tuple(e) for e in d.edges.tolist()}


def test_tile_corners_equidistant(config_20):
    vor = voronoi_dual(config_20.delaunay)
    p = config_20.delaunay.points
    for v in range(0, config_20.delaunay.n_vertices, 17):
        corners = vor.tile(v)
        r = np.hypot(*(corners - p[v]).T)
        nn = config_20.delaunay.kdtree.query(corners)[0]
        assert np.allclose(r, nn, rtol=1e-9, atol=1e-9)


# ----------------------------------------------------------------- locate


def test_locate_sample_point_returns_itself(config_20):
    d = config_20.delaunay
    for v in (0, 5, d.n_vertices - 1):
        assert locate(d.points[v], d) == v


def test_locate_tie_goes_to_smaller_index():
    d = build_delaunay(np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 5.0]]))
    assert locate((1.0, 0.0), d) == 0


def test_locate_matches_linear_scan(config_20):
    d = config_20.delaunay
    q = np.random.default_rng(9).uniform(-20, 20, size=(1000, 2))
    got = locate(q, d)
    assert all(int(g) == nearest_scan(d.points, x) for g, x in zip(got, q))


def test_locate_outside_window(config_20):
    with pytest.raises(OutsideWindowError):
        locate((25.0, 0.0), config_20.delaunay)


# ----------------------------------------------------------------- segment paths


def test_same_tile_single_vertex(config_20):
    d = config_20.delaunay
    p = d.points[3]
    assert segment_path(p, p + 1e-6, d).vertices == [3]


@given(st.tuples(st.floats(-15, 15), st.floats(-15, 15)), st.tuples(st.floats(-15, 15), st.floats(-15, 15)))
def test_segment_path_contract(config_20, x, y):
    d = config_20.delaunay
    path = segment_path(x, y, d)
    v = path.vertices
    assert v[0] == locate(x, d)
    assert v[-1] == locate(np.asarray(y) + path.perturbation, d)
    for a, b in zip(v, v[1:]):
        assert b in d.neighbors(a)
    assert len(set(v)) == len(v)
    # tiles visited are those containing sample points along the segment
    t = np.linspace(0, 1, 400)
    xy = np.asarray(x) + t[:, None] * (np.asarray(y) - np.asarray(x))
    if path.perturbation == (0.0, 0.0):
        assert set(locate(xy, d).tolist()) <= set(v)


@given(st.tuples(st.floats(-15, 15), st.floats(-15, 15)), st.tuples(st.floats(-15, 15), st.floats(-15, 15)))
def test_segment_path_reverses(config_20, x, y):
    d = config_20.delaunay
    a, b = segment_path(x, y, d), segment_path(y, x, d)
    if a.perturbation or b.perturbation:
        return
    assert a.vertices == b.vertices[::-1]


def test_edge_census_base_and_monotone(config_40):
    d = config_40.delaunay
    vor = voronoi_dual(d)
    base = edge_census(0.0, d, vor)
    tiles0 = set(tiles_meeting_rect((-0.5, -0.5), (0.5, 0.5), d).tolist())
    expect = {e for e, (u, v) in enumerate(d.edges.tolist()) if u in tiles0 or v in tiles0}
    assert set(base.edges.tolist()) == expect
    counts = [edge_census(n, d, vor).count for n in range(0, 25, 3)]
    assert counts == sorted(counts)


def test_tiles_meeting_rect_against_dense_sampling(config_20):
    d = config_20.delaunay
    lo, hi = np.array([-3.0, -1.0]), np.array([4.0, 2.5])
    got = set(tiles_meeting_rect(lo, hi, d).tolist())
    g = np.stack(np.meshgrid(np.linspace(lo[0], hi[0], 300), np.linspace(lo[1], hi[1], 300)), -1).reshape(-1, 2)
    assert set(locate(g, d).tolist()) <= got


# ----------------------------------------------------------------- full boxes


def test_full_fraction_large_subboxes():
    pts = sample_poisson(SimWindow(200.0), 1.0, 3)
    g = full_box_grid(pts, 60.0)  # sub-box area 100
    assert g.full_fraction == 1.0
    assert full_probability(60.0) >= 1 - 36 * np.exp(-100)


def test_full_fraction_tiny_subboxes():
    pts = sample_poisson(SimWindow(20.0), 1.0, 3)
    g = full_box_grid(pts, 0.6)  # sub-box area 0.01
    assert g.full_fraction <= 1e-6 + (1 - np.exp(-0.01)) ** 36 * 10
    assert g.full_fraction == 0.0


def test_full_fraction_matches_analytic_probability():
    L = 9.0
    pts = sample_poisson(SimWindow(300.0), 1.0, 8)
    g = full_box_grid(pts, L)
    p = full_probability(L)
    n = g.full.size
    assert abs(g.full_fraction - p) < 4 * np.sqrt(p * (1 - p) / n)


def test_full_box_flag_definition():
    # one point per sub-box except one
    L = 6.0
    c = np.array([(i + 0.5 - 3, j + 0.5 - 3) for i in range(6) for j in range(6)])
    win = SimWindow(3.5)
    g = full_box_grid(PointSet(c, 1.0, win), L)
    assert g.full.shape == (1, 1) and g.full[0, 0]
    g2 = full_box_grid(PointSet(c[1:], 1.0, win), L)
    assert not g2.full[0, 0]


def test_circuit_confines_tiles():
    pts = sample_poisson(SimWindow(90.0), 1.0, 5)
    d = build_delaunay(pts)
    vor = voronoi_dual(d)
    grid = full_box_grid(pts, 15.0)  # P(full) ~ 0.93
    circ = enclosing_circuit(grid, (-1.0, -1.0), (1.0, 1.0))
    assert circ is not None
    n, bad = circuit_confinement_audit(circ, d, vor)
    assert n > 0 and bad == 0
