"""Experiment configuration: validation, JSON round trip, content hash."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from fpplab.competition import SeedSet
from fpplab.fpp import PassageTimeLaw
from fpplab.geometry import SimWindow

KINDS = ("simulate", "shape", "busemann", "compete", "coexist", "census", "render")

# fields that change where or how fast results are produced, not what they are
NON_SEMANTIC = ("workers", "out")


class ConfigError(ValueError):
    def __init__(self, fieldname: str, message: str):
        super().__init__(f"{fieldname}: {message}")
        self.field = fieldname


@dataclass
class ExperimentConfig:
    kind: str
    half_width: float = 50.0
    buffer_fraction: float = 0.2
    intensity: float = 1.0
    law: dict = field(default_factory=lambda: {"family": "exponential", "params": [1.0]})
    seeds: dict = field(default_factory=lambda: {"layout": "polygon", "k": 2, "radius": 10.0})
    radii: list = field(default_factory=list)
    angles: list = field(default_factory=list)
    n_values: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    eps: float = math.pi / 8
    replicates: int = 1
    master_seed: int = 0
    workers: int = 1
    out: str | None = None
    render: bool = False

    def __post_init__(self):
        # normalize numbers so that 5 and 5.0 hash alike
        try:
            for name in ("half_width", "buffer_fraction", "intensity", "eps"):
                setattr(self, name, float(getattr(self, name)))
            for name in ("radii", "angles", "n_values", "alphas"):
                setattr(self, name, [float(x) for x in getattr(self, name)])
            for name in ("replicates", "master_seed", "workers"):
                setattr(self, name, int(getattr(self, name)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(name, f"not numeric ({exc})") from None
        self.law = {"family": self.law.get("family"), "params": [float(p) for p in self.law.get("params", [])]}
        self.validate()

    # -- derived objects
    @property
    def window(self) -> SimWindow:
        return SimWindow(float(self.half_width), float(self.buffer_fraction))

    @property
    def passage_law(self) -> PassageTimeLaw:
        return PassageTimeLaw(self.law["family"], tuple(self.law.get("params", ())))

    def seed_set(self) -> SeedSet:
        s = self.seeds
        layout = s.get("layout", "polygon")
        if layout == "polygon":
            return SeedSet.regular_polygon(int(s["k"]), float(s["radius"]))
        return SeedSet(np.asarray(s["points"], dtype=float), layout)

    # -- validation
    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {', '.join(KINDS)}, got {self.kind!r}")
        if not self.half_width > 0:
            raise ConfigError("half_width", "must be positive")
        if not 0 < self.buffer_fraction < 1:
            raise ConfigError("buffer_fraction", "must lie in (0, 1)")
        if not self.intensity > 0:
            raise ConfigError("intensity", "must be positive")
        if int(self.replicates) < 1:
            raise ConfigError("replicates", "must be at least 1")
        if int(self.workers) < 1:
            raise ConfigError("workers", "must be at least 1")
        try:
            self.passage_law
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("law", str(exc)) from None
        try:
            seeds = self.seed_set()
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("seeds", str(exc)) from None
        inner = self.window.inner_half_width
        if self.kind in ("compete", "render"):
            far = np.abs(seeds.points).max()
            if far > inner:
                raise ConfigError("seeds", f"seed coordinate {far:g} lies outside the inner half-width {inner:g}")
        for name in ("radii", "n_values"):
            for x in getattr(self, name):
                if not 0 < float(x) <= inner:
                    raise ConfigError(name, f"value {x:g} must lie in (0, {inner:g}] (inner half-width)")
        for a in self.alphas:
            if not 0 <= float(a) < math.pi / 2:
                raise ConfigError("alphas", f"value {a:g} must lie in [0, pi/2)")
        if self.kind == "coexist":
            k = int(self.seeds.get("k", 0))
            if k < 1:
                raise ConfigError("seeds", "coexist needs seeds.k >= 1")
        if self.kind in ("shape", "coexist") and not self.radii:
            raise ConfigError("radii", f"{self.kind} needs at least one radius")
        if self.kind in ("busemann", "census") and not self.n_values:
            raise ConfigError("n_values", f"{self.kind} needs at least one n value")
        if self.kind == "busemann" and not self.alphas:
            raise ConfigError("alphas", "busemann needs at least one alpha")

    # -- serialization
    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigError(unknown[0], "unknown field")
        if "kind" not in d:
            raise ConfigError("kind", "missing")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_json(Path(path).read_text())

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def config_hash(self) -> str:
        d = {k: v for k, v in self.to_dict().items() if k not in NON_SEMANTIC}
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]
