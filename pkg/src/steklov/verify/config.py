"""Experiment configuration: TOML schema, validation and hashing.

Schema (every key optional; unknown keys are rejected)::

    dim = 1                 # 1 or 2; omit to run checks in both dimensions
    max_degree = 128        # truncation K; omit for per-check defaults
    potential = "zero"      # zero | constant:c | cos-lowfreq[:amp=,freq=]
                            # | random-lipschitz[:seed=,lip=,degree=]
    p = [2.0, 4.0, 6.0]     # exponents for norm reports (inf allowed)
    alpha = [0.5, 1.0, 1.5] # fractional orders in (0, 2)
    seed = 0
    out = "results"
    checks = []             # subset of check ids; empty runs all

    [fit]
    lambda_min = 8.0        # fit window on S^2 and the lower end on S^1
    lambda_max = 96.0       # upper end on S^2
    lambda_max_circle = 128.0

    [heat]
    t_min_exp = 7           # time grid 2^-t_min_exp .. 2^-t_max_exp
    t_max_exp = 3
    picard_t = 0.25

    [nodal]
    refinement = 8

    [cluster]
    window = 12             # degree half-width of windowed cluster solves
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
import tomli_w

__all__ = [
    "FitConfig",
    "HeatConfig",
    "NodalConfig",
    "ClusterConfig",
    "ExperimentConfig",
    "ConfigError",
    "load_config",
]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FitConfig:
    lambda_min: float = 8.0
    lambda_max: float = 96.0
    lambda_max_circle: float = 128.0


@dataclass(frozen=True)
class HeatConfig:
    t_min_exp: int = 7
    t_max_exp: int = 3
    picard_t: float = 0.25

    @property
    def times(self):
        return [2.0**-j for j in range(self.t_max_exp, self.t_min_exp + 1)]


@dataclass(frozen=True)
class NodalConfig:
    refinement: int = 8


@dataclass(frozen=True)
class ClusterConfig:
    window: int = 12


_TABLES = {"fit": FitConfig, "heat": HeatConfig, "nodal": NodalConfig, "cluster": ClusterConfig}


@dataclass(frozen=True)
class ExperimentConfig:
    dim: Optional[int] = None
    max_degree: Optional[int] = None
    potential: str = "zero"
    p: tuple = (2.0, 4.0, 6.0)
    alpha: tuple = (0.5, 1.0, 1.5)
    seed: int = 0
    out: str = "results"
    checks: tuple = ()
    fit: FitConfig = field(default_factory=FitConfig)
    heat: HeatConfig = field(default_factory=HeatConfig)
    nodal: NodalConfig = field(default_factory=NodalConfig)
    cluster: ClusterConfig = field(default_factory=ClusterConfig)

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))
        object.__setattr__(self, "alpha", tuple(float(x) for x in self.alpha))
        object.__setattr__(self, "checks", tuple(str(x) for x in self.checks))
        self.validate()

    # ------------------------------------------------------------------
    def validate(self):
        if self.dim is not None and self.dim not in (1, 2):
            raise ConfigError(f"dim must be 1 or 2, got {self.dim!r}")
        if self.max_degree is not None and not (isinstance(self.max_degree, int) and 1 <= self.max_degree <= 8192):
            raise ConfigError(f"max_degree must be an integer in [1, 8192], got {self.max_degree!r}")
        for p in self.p:
            if not (p >= 2 or math.isinf(p)):
                raise ConfigError(f"every p must be >= 2 (or inf), got {p}")
        for a in self.alpha:
            if not 0 < a < 2:
                raise ConfigError(f"every alpha must lie in (0, 2), got {a}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigError("seed must be a nonnegative integer")
        f = self.fit
        if not 0 < f.lambda_min < f.lambda_max or f.lambda_min >= f.lambda_max_circle:
            raise ConfigError("need 0 < fit.lambda_min < fit.lambda_max and < fit.lambda_max_circle")
        h = self.heat
        if not (1 <= h.t_max_exp <= h.t_min_exp <= 12):
            raise ConfigError("need 1 <= heat.t_max_exp <= heat.t_min_exp <= 12")
        if not 0 < h.picard_t <= 1:
            raise ConfigError("heat.picard_t must lie in (0, 1]")
        if self.nodal.refinement < 4:
            raise ConfigError("nodal.refinement must be >= 4")
        if self.cluster.window < 2:
            raise ConfigError("cluster.window must be >= 2")

    # ------------------------------------------------------------------
    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["p"] = list(self.p)
        d["alpha"] = list(self.alpha)
        d["checks"] = list(self.checks)
        return {k: v for k, v in d.items() if v is not None}

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        for key, sub in _TABLES.items():
            if key in data:
                table = data[key]
                if not isinstance(table, dict):
                    raise ConfigError(f"[{key}] must be a table")
                allowed = {f.name for f in dataclasses.fields(sub)}
                bad = set(table) - allowed
                if bad:
                    raise ConfigError(f"unknown key(s) in [{key}]: {sorted(bad)}")
                data[key] = sub(**table)
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_toml(cls, text: str) -> "ExperimentConfig":
        try:
            return cls.from_dict(tomllib.loads(text))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config: {exc}") from exc

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form (sorted keys, repr floats)."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), allow_nan=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def dims(self):
        return (1, 2) if self.dim is None else (self.dim,)


def load_config(path) -> ExperimentConfig:
    return ExperimentConfig.from_toml(Path(path).read_text(encoding="utf-8"))
