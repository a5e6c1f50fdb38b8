"""Regenerate tests/data/five.svg from the five-point fixture."""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from test_competition import FIVE, FIVE_WEIGHTS  # noqa: E402

from fpplab.competition import SeedSet, compete, extract_interface  # noqa: E402
from fpplab.fpp import EdgeWeights  # noqa: E402
from fpplab.geometry import build_delaunay, voronoi_dual  # noqa: E402
from fpplab.harness.render import render_svg  # noqa: E402

d = build_delaunay(FIVE)
vor = voronoi_dual(d)
seeds = SeedSet([FIVE[1], FIVE[3]])
lab = compete(d, EdgeWeights(FIVE_WEIGHTS), seeds)
print(render_svg(lab, extract_interface(lab, vor).edges, vor, ROOT / "tests" / "data" / "five.svg", seeds.points))
