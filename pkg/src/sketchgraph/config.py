"""Pipeline configuration with JSON round-trip and flag overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .infer import InferParams


@dataclass
class PipelineConfig:
    size: int = 256
    stroke_width: float = 2.0
    vertex_radius: float = 3.0
    margin: float = 8.0
    beta: float = 1.8
    tau: float = 0.35
    rate: float = 0.05
    i_max: int = 10
    render_width: float = 2.0
    seed: int = 0
    count: int = 8
    input: str | None = None
    out: str = "out"
    drop_rate: float = 0.0
    dilate_px: int = 0
    salt_rate: float = 0.0

    # JSON keys for fields whose natural names are awkward on a CLI
    _ALIASES = {"lambda": "rate", "imax": "i_max", "tau0": "tau"}

    def __post_init__(self):
        if self.size < 8:
            raise ValueError("size must be >= 8")
        if self.stroke_width < 1:
            raise ValueError("stroke_width must be >= 1")
        if self.vertex_radius <= 0:
            raise ValueError("vertex_radius must be positive")
        if 2 * self.margin >= self.size:
            raise ValueError("margin too large for canvas")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        if self.rate < 0 or self.i_max < 0 or self.count < 0:
            raise ValueError("rate, i_max and count must be non-negative")
        for name in ("drop_rate", "salt_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    def infer_params(self) -> InferParams:
        return InferParams(beta=self.beta, tau0=self.tau, rate=self.rate,
                           i_max=self.i_max, render_width=self.render_width,
                           vertex_radius=self.vertex_radius)

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            d[f.name] = getattr(self, f.name)
        d["lambda"] = d.pop("rate")
        d["imax"] = d.pop("i_max")
        return d

    def report_dict(self) -> dict:
        """Config as recorded inside artifacts: generation parameters only,
        no output location, so equal-seed runs produce identical bytes."""
        d = self.to_dict()
        d.pop("out")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in d.items():
            name = cls._ALIASES.get(key, key)
            if name not in known:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[name] = value
        return cls(**kwargs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def replace(self, **overrides) -> "PipelineConfig":
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update({k: v for k, v in overrides.items() if v is not None})
        return PipelineConfig(**d)
