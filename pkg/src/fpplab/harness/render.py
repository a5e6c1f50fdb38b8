"""Static SVG picture of a competition labeling.

One ``<polygon>`` per interior tile (vertex order), one ``<line>`` per
interface edge (edge-id order), one ``<circle>`` per seed (seed order).
Nothing else is drawn, so the drawable-element count is exact.
"""

from __future__ import annotations

import numpy as np

from fpplab.harness.io import atomic_write_text

PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac")


def _f(x: float) -> str:
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def svg_text(labeling, interface_edges, voronoi, seeds_xy, size: int = 800) -> str:
    d = voronoi.delaunay
    if d.window is not None:
        h = d.window.half_width
        lo, hi = np.array([-h, -h]), np.array([h, h])
    else:
        lo, hi = d.points.min(axis=0) - 1.0, d.points.max(axis=0) + 1.0
    span = float(max(hi - lo))
    stroke = span / size
    # y grows upward in model space, downward in SVG
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="{_f(lo[0])} {_f(-hi[1])} {_f(span)} {_f(span)}">\n'
        f'<g transform="scale(1,-1)" stroke-linejoin="round">\n'
    )
    parts = [head]
    parts.append(f'<g id="tiles" stroke="#ffffff" stroke-width="{_f(stroke)}">\n')
    for v in voronoi.interior_vertices():
        poly = voronoi.tile(int(v))
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in poly)
        colour = PALETTE[int(labeling.label[v]) % len(PALETTE)]
        parts.append(f'<polygon points="{pts}" fill="{colour}"/>\n')
    parts.append("</g>\n")
    parts.append(f'<g id="interface" stroke="#000000" stroke-width="{_f(3 * stroke)}">\n')
    ev = voronoi.edge_vertices
    for e in sorted(map(int, interface_edges)):
        (x1, y1), (x2, y2) = voronoi.vertices[ev[e, 0]], voronoi.vertices[ev[e, 1]]
        parts.append(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}"/>\n')
    parts.append("</g>\n")
    parts.append(f'<g id="seeds" fill="#ffffff" stroke="#000000" stroke-width="{_f(2 * stroke)}">\n')
    for x, y in np.asarray(seeds_xy, dtype=float).reshape(-1, 2):
        parts.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(6 * stroke)}"/>\n')
    parts.append("</g>\n</g>\n</svg>\n")
    return "".join(parts)


def render_svg(labeling, interface_edges, voronoi, path, seeds_xy, size: int = 800):
    """Write the SVG atomically; raises OSError when ``path`` is unwritable."""
    return atomic_write_text(path, svg_text(labeling, interface_edges, voronoi, seeds_xy, size))


def count_elements(svg: str) -> int:
    return sum(svg.count(tag) for tag in ("<polygon ", "<line ", "<circle "))
