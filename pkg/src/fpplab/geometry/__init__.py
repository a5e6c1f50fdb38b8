from fpplab.geometry.boxes import Circuit, FullBoxGrid, circuit_confinement_audit, enclosing_circuit, full_box_grid, full_probability
from fpplab.geometry.delaunay import DelaunayGraph, build_delaunay, locate
from fpplab.geometry.tracing import EdgeCensus, SegmentPath, edge_census, segment_path, tiles_meeting_rect
from fpplab.geometry.voronoi import VoronoiTessellation, polygon_is_convex, voronoi_dual
from fpplab.geometry.window import (
    DegenerateConfigurationError,
    OutsideWindowError,
    PointSet,
    SimWindow,
    points_csv_text,
    read_points_csv,
    sample_poisson,
    write_points_csv,
)

__all__ = [
    "Circuit",
    "DegenerateConfigurationError",
    "DelaunayGraph",
    "EdgeCensus",
    "FullBoxGrid",
    "OutsideWindowError",
    "PointSet",
    "SegmentPath",
    "SimWindow",
    "VoronoiTessellation",
    "build_delaunay",
    "circuit_confinement_audit",
    "edge_census",
    "enclosing_circuit",
    "full_box_grid",
    "full_probability",
    "locate",
    "points_csv_text",
    "polygon_is_convex",
    "read_points_csv",
    "sample_poisson",
    "segment_path",
    "tiles_meeting_rect",
    "voronoi_dual",
]
