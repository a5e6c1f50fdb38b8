"""Atomic file output and the CSV layouts shared by experiments."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def atomic_write_text(path, text: str) -> Path:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (list, tuple, np.ndarray)):
        return " ".join(str(_cell(v)) for v in x)
    return x


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        vals = [r[h] for h in header] if isinstance(r, dict) else r
        w.writerow([_cell(v) for v in vals])
    return buf.getvalue()


def write_csv(path, header, rows) -> Path:
    return atomic_write_text(path, csv_text(header, rows))


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_json(path, obj) -> Path:
    return atomic_write_text(path, json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n")


LABELING_HEADER = ["id", "x", "y", "label", "arrival"]
BRANCH_HEADER = ["branch", "species_a", "species_b", "boundary_end", "closed", "vertices", "theta", "exponent"]
INTERFACE_HEADER = ["edge", "u", "v", "voronoi_a", "voronoi_b"]


def labeling_rows(labeling, points) -> list[list]:
    return [
        [v, float(points[v, 0]), float(points[v, 1]), int(labeling.label[v]), float(labeling.arrival[v])]
        for v in range(len(labeling.label))
    ]


def interface_rows(edge_ids, delaunay) -> list[list]:
    E, T = delaunay.edges, delaunay.edge_triangles
    return [[int(e), int(E[e, 0]), int(E[e, 1]), int(T[e, 0]), int(T[e, 1])] for e in edge_ids]
