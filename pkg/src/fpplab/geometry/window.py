"""Simulation windows and Poisson point configurations."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from fpplab import rng as rngmod


class DegenerateConfigurationError(ValueError):
    """The sampled or supplied geometry cannot be triangulated."""


class OutsideWindowError(ValueError):
    pass


@dataclass(frozen=True)
class SimWindow:
    """The square [-R, R]^2 with an excluded outer margin.

    Statistics are only taken in the inner square of half-width
    ``(1 - buffer_fraction) * R``.
    """

    half_width: float
    buffer_fraction: float = 0.2

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if not 0 < self.buffer_fraction < 1:
            raise ValueError(f"buffer_fraction must lie in (0, 1), got {self.buffer_fraction}")

    @property
    def area(self) -> float:
        return 4.0 * self.half_width**2

    @property
    def inner_half_width(self) -> float:
        return (1.0 - self.buffer_fraction) * self.half_width

    @property
    def buffer_width(self) -> float:
        return self.buffer_fraction * self.half_width

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all(np.abs(x) <= self.half_width, axis=-1)

    def in_inner(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all(np.abs(x) <= self.inner_half_width, axis=-1)

    def to_dict(self) -> dict:
        return {"half_width": self.half_width, "buffer_fraction": self.buffer_fraction}


@dataclass(frozen=True, eq=False)
class PointSet:
    points: np.ndarray
    intensity: float
    window: SimWindow
    seed: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def header(self) -> dict:
        return {"seed": self.seed, "intensity": self.intensity, "window": self.window.to_dict(), "count": len(self)}


def sample_poisson(window: SimWindow, intensity: float, seed: int, replicate: int = 0) -> PointSet:
    """Homogeneous Poisson process of the given intensity on the window.

    Raises DegenerateConfigurationError when the draw is empty; callers
    retry with another replicate index.
    """
    if not intensity > 0:
        raise ValueError(f"intensity must be positive, got {intensity}")
    gen = rngmod.stream(seed, rngmod.GEOMETRY, replicate)
    count = int(gen.poisson(intensity * window.area))
    if count == 0:
        raise DegenerateConfigurationError("Poisson draw produced zero points")
    R = window.half_width
    pts = gen.uniform(-R, R, size=(count, 2))
    if len(np.unique(pts, axis=0)) != count:  # probability zero, kept as a guard
        raise DegenerateConfigurationError("repeated point in Poisson draw")
    return PointSet(pts, float(intensity), window, rngmod.seed_record(seed, rngmod.GEOMETRY, replicate))


def points_csv_text(points: PointSet) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(points.header(), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y"])
    for x, y in points.points:
        w.writerow([repr(float(x)), repr(float(y))])
    return buf.getvalue()


def write_points_csv(points: PointSet, path) -> None:
    Path(path).write_text(points_csv_text(points))


def read_points_csv(path) -> PointSet:
    lines = Path(path).read_text().splitlines()
    header = json.loads(lines[0][2:])
    rows = list(csv.reader(lines[2:]))
    pts = np.array([[float(x), float(y)] for x, y in rows]).reshape(-1, 2)
    win = SimWindow(**header["window"])
    return PointSet(pts, header["intensity"], win, header["seed"])
