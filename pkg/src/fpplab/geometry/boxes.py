"""Renormalization boxes: full boxes and circuits of full boxes.

Box ``z`` (integer pair) is the square ``L z + [-L/2, L/2]^2``.  It is
*full* when each of its 6 x 6 congruent sub-squares holds a point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from fpplab.geometry.delaunay import DelaunayGraph
from fpplab.geometry.tracing import tiles_meeting_rect
from fpplab.geometry.window import PointSet

SUB = 6


@dataclass(frozen=True, eq=False)
class FullBoxGrid:
    """``full[i, j]`` refers to box ``z = (i + zmin, j + zmin)``."""

    box_side: float
    zmin: int
    full: np.ndarray

    @property
    def full_fraction(self) -> float:
        return float(self.full.mean()) if self.full.size else float("nan")

    def box_bounds(self, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
        c = self.box_side * np.array([i + self.zmin, j + self.zmin], dtype=float)
        return c - self.box_side / 2, c + self.box_side / 2


def full_probability(box_side: float, intensity: float = 1.0) -> float:
    """P(box is full) = (1 - exp(-intensity * sub_area))^36."""
    sub_area = (box_side / SUB) ** 2
    return float((-np.expm1(-intensity * sub_area)) ** (SUB * SUB))


def full_box_grid(points: PointSet, L: float) -> FullBoxGrid:
    """Flag every box lying entirely inside the window."""
    if not L > 0:
        raise ValueError("box side must be positive")
    R = points.window.half_width
    zmax = int(np.floor((R - L / 2) / L + 1e-12))
    if zmax < 0:
        return FullBoxGrid(L, 0, np.zeros((0, 0), dtype=bool))
    nb = 2 * zmax + 1
    origin = -L * zmax - L / 2
    sub = L / SUB
    idx = np.floor((points.points - origin) / sub).astype(np.int64)
    ok = np.all((idx >= 0) & (idx < nb * SUB), axis=1)
    counts = np.zeros((nb * SUB, nb * SUB), dtype=np.int64)
    np.add.at(counts, (idx[ok, 0], idx[ok, 1]), 1)
    occupied = (counts > 0).reshape(nb, SUB, nb, SUB)
    full = occupied.all(axis=(1, 3))
    return FullBoxGrid(L, -zmax, full)


@dataclass(frozen=True, eq=False)
class Circuit:
    """Enclosed cells ``inside`` and the surrounding ring of full boxes."""

    grid: FullBoxGrid
    inside: np.ndarray
    ring: np.ndarray


def enclosing_circuit(grid: FullBoxGrid, target_lo, target_hi) -> Circuit | None:
    """Smallest ring of full boxes surrounding the target rectangle.

    The enclosed region is the 8-connected cluster of non-full boxes grown
    from the boxes meeting the target, with holes filled.  Returns None if
    that cluster reaches the edge of the grid.
    """
    full = grid.full
    nb = full.shape[0]
    L = grid.box_side
    lo = np.floor((np.asarray(target_lo) / L) + 0.5).astype(int) - grid.zmin
    hi = np.floor((np.asarray(target_hi) / L) + 0.5).astype(int) - grid.zmin
    if np.any(lo < 0) or np.any(hi >= nb):
        return None
    seed = np.zeros_like(full)
    seed[lo[0] : hi[0] + 1, lo[1] : hi[1] + 1] = True
    free = ~full | seed
    labels, _ = ndimage.label(free, structure=np.ones((3, 3)))
    ids = np.unique(labels[seed])
    region = np.isin(labels, ids[ids > 0])
    if region[0, :].any() or region[-1, :].any() or region[:, 0].any() or region[:, -1].any():
        return None
    inside = ndimage.binary_fill_holes(region)
    ring = ndimage.binary_dilation(inside, structure=np.ones((3, 3))) & ~inside
    if not full[ring].all():  # cannot happen by construction; kept as a check
        return None
    return Circuit(grid, inside, ring)


def circuit_confinement_audit(circuit: Circuit, delaunay: DelaunayGraph, voronoi, samples_per_edge: int = 8):
    """Check that tiles meeting the enclosed cells stay inside the polygon
    through the ring's box centres.

    That polygon bounds the set of points within Chebyshev distance L/2 of
    the enclosed cells.  Returns ``(n_tiles, n_violations)``.
    """
    grid = circuit.grid
    L = grid.box_side
    cells = np.argwhere(circuit.inside)
    centres = L * (cells + grid.zmin).astype(float)
    tiles = set()
    for c in centres:
        tiles.update(tiles_meeting_rect(c - L / 2, c + L / 2, delaunay).tolist())
    violations = 0
    t = np.linspace(0.0, 1.0, samples_per_edge, endpoint=False)
    for v in sorted(tiles):
        if not voronoi.bounded[v]:
            violations += 1
            continue
        poly = voronoi.tile(v)
        nxt = np.roll(poly, -1, axis=0)
        probe = (poly[:, None, :] + t[None, :, None] * (nxt - poly)[:, None, :]).reshape(-1, 2)
        cheb = np.max(np.abs(probe[:, None, :] - centres[None, :, :]), axis=2).min(axis=1)
        if np.any(cheb >= L):
            violations += 1
    return len(tiles), violations
