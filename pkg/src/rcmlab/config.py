"""Experiment configuration: a flat, versioned JSON object."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

from .rng import MASK64

CONFIG_VERSION = 1
KINDS = ("esd", "ssv_sweep", "norm_sweep", "expansion", "distance", "threshold", "oracle", "replacement")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    kind: str
    n: int
    d: int
    version: int = CONFIG_VERSION
    m: int | None = None
    d_values: list | None = None
    z_re: float = 0.0
    z_im: float = 0.0
    trials: int = 1
    seed: int = 0
    out: str = "rcmlab_out"
    preset: str = "default"
    # constant overrides
    a1: float | None = None
    a2: float | None = None
    a3: float | None = None
    C2: float = 1.0
    c1: float = 1.0
    s_threshold: float | None = None
    # kind-specific knobs
    k: int | None = None
    p: float | None = None
    eps: float | None = None
    tau: float = 0.5
    model: str = "bernoulli"

    @property
    def z(self) -> complex:
        return complex(self.z_re, self.z_im)

    @property
    def degrees(self) -> list[int]:
        return [int(x) for x in self.d_values] if self.d_values else [self.d]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(obj) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        missing = [k for k in ("kind", "n", "d") if k not in obj]
        if missing:
            raise ConfigError(f"missing config keys: {', '.join(missing)}")
        try:
            cfg = cls(**obj)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(obj)

    def validate(self) -> "ExperimentConfig":
        if self.version != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {self.version}")
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError("n must be a positive integer")
        for d in self.degrees:
            if not 1 <= d <= self.n:
                raise ConfigError(f"need 1 <= d <= n, got d={d}, n={self.n}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.seed <= MASK64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.preset not in ("default", "relaxed"):
            raise ConfigError(f"unknown preset {self.preset!r}")
        if not (math.isfinite(self.z_re) and math.isfinite(self.z_im)):
            raise ConfigError("shift z must be finite")
        kind = self.kind
        if kind in ("esd", "replacement"):
            for d in self.degrees:
                if d >= self.n:
                    raise ConfigError("normalization needs d < n")
        if kind == "distance":
            k = self.k if self.k is not None else self.n // 2
            if not 1 <= k < self.n:
                raise ConfigError("distance experiments need 1 <= k < n")
            p = self.p if self.p is not None else self.d / self.n
            if not 0 < p < 1:
                raise ConfigError("p must lie in (0, 1)")
            if self.model not in ("bernoulli", "fixed_sum"):
                raise ConfigError(f"unknown distance model {self.model!r}")
        if kind == "expansion":
            if self.k is not None and not 1 <= self.k <= self.n:
                raise ConfigError("expansion set size k must lie in [1, n]")
            if self.n != (self.m or self.n):
                raise ConfigError("expansion needs a square matrix")
        if kind == "oracle":
            if math.comb(self.n, self.d) ** self.n > 10 ** 7:
                raise ConfigError("oracle enumeration exceeds the 10^7 state budget")
        if kind == "norm_sweep" and self.m is not None and self.m < 1:
            raise ConfigError("m must be positive")
        if self.tau <= 0:
            raise ConfigError("tau must be positive")
        return self
