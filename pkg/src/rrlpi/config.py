"""Run configuration shared by the command line and TOML files."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .estimators import HUBER_C
from .penalty import GammaSearchConfig

__all__ = ["Config", "load_toml", "ConfigError"]


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    """Every tunable of the command line; TOML keys use the same names."""

    seed: int = 0
    out_dir: str = "."
    log_level: str = "WARNING"
    # penalty search
    gamma_min: float = 1e-8
    gamma_max: float = 1e3
    n_candidates: int = 20
    kappa_mode: str = "zero"
    n_min: float | None = None
    delta_scale: float = 1.0
    huber_c: float = HUBER_C
    # estimation
    method: str = "rrlpi"
    gamma: float | None = None
    auto_gamma: bool = False
    # enumeration / partitioning
    k_min: int = 1
    k_max: int = 10
    k: int = 2
    partitioner: str = "kmeans"
    # images
    noise_var: float = 0.0
    target_n: int = 15000
    match_radius: int = 1
    # synthetic data and benchmarks
    n_per_cluster: int = 50
    n_out1: int = 0
    theta_o1: float = 0.0
    n_out2: int = 0
    theta_o2: float = 1.5
    n_runs: int = 100
    theta_o1_grid: list = field(default_factory=lambda: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10])
    methods: list = field(default_factory=lambda: ["le", "lpi", "rlpi", "rrlpi"])

    def update(self, values: dict) -> "Config":
        names = {f.name for f in fields(self)}
        for k, v in values.items():
            k = k.replace("-", "_")
            if k not in names:
                raise ConfigError(f"unknown configuration key {k!r}")
            setattr(self, k, v)
        return self

    def gamma_search(self) -> GammaSearchConfig:
        return GammaSearchConfig(
            gamma_min=self.gamma_min,
            gamma_max=self.gamma_max,
            n_candidates=self.n_candidates,
            kappa_mode=self.kappa_mode,
            n_min=self.n_min,
            k_max=self.k_max,
            delta_scale=self.delta_scale,
            huber_c=self.huber_c,
        )


def load_toml(path) -> dict:
    """Flat key/value table from a TOML file; nested tables are merged in."""
    try:
        data = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    flat = {}
    for k, v in data.items():
        if isinstance(v, dict):
            flat.update(v)
        else:
            flat[k] = v
    return flat
