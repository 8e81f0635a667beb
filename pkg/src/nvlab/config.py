"""Run configuration: flat ``key = value`` files, overridden by command-line flags."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .lvalue import DEFAULT_G, KernelConfig
from .mollifier import MollifierSpec, PolySpec
from .moments import TAU_NV
from .weights import WeightConfig

__all__ = ["RunConfig", "parse_config_file", "parse_coeffs", "ConfigError"]


class ConfigError(ValueError):
    pass


def parse_coeffs(text) -> tuple:
    """'0, 1' or '[0, 0.5, 0.5]' or '0 1/2 1/2' -> tuple of strings for PolySpec."""
    if isinstance(text, (list, tuple)):
        return tuple(str(t) for t in text)
    body = str(text).strip().strip("[]()")
    parts = [p for p in body.replace(",", " ").split() if p]
    if not parts:
        raise ConfigError(f"empty coefficient list: {text!r}")
    return tuple(parts)


@dataclass
class RunConfig:
    Q: float = 200.0
    eta1: float = 0.0
    eta2: float = 0.0
    a: int = 1
    D: int = 1
    eps_split: float = 0.05
    theta1: float = 0.15
    theta2: float = 0.15
    poly1: tuple = ("0", "1")
    poly2: tuple = ("0", "1")
    epsilon: float = 0.0
    c0: float = 1.0
    kernel_h: float = 0.25
    kernel_tol: float = 1e-12
    g_coeffs: tuple = DEFAULT_G
    fast_kernel: bool = False
    tau_nv: float = TAU_NV
    threads: int = 0
    cache: str | None = None
    out: str = "."
    format: str = "csv"
    seed: int = 0
    degree: int = 8
    force: bool = False

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.threads < 0:
            raise ConfigError("threads must be >= 0 (0 = auto)")
        if self.tau_nv <= 0:
            raise ConfigError("tau_nv must be positive")

    def weight_config(self) -> WeightConfig:
        return WeightConfig(self.Q, self.eta1, self.eta2, self.eps_split, self.a, self.D)

    def mollifier_spec(self) -> MollifierSpec:
        return MollifierSpec(self.theta1, self.theta2, PolySpec(self.poly1), PolySpec(self.poly2), self.Q)

    def kernel_config(self) -> KernelConfig:
        return KernelConfig(
            g_coeffs=tuple(float(c) for c in self.g_coeffs),
            c0=self.c0,
            h=self.kernel_h,
            tol=self.kernel_tol,
            fast=self.fast_kernel,
        )

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["poly1"] = list(self.poly1)
        d["poly2"] = list(self.poly2)
        d["g_coeffs"] = list(self.g_coeffs)
        return d

    @classmethod
    def from_mapping(cls, values: dict) -> RunConfig:
        known = {f.name: f for f in fields(cls)}
        kw = {}
        for key, raw in values.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown config key {key!r}")
            kw[name] = _coerce(known[name], raw)
        return cls(**kw)


def _coerce(f: dataclasses.Field, raw):
    if raw is None:
        return None
    name, default = f.name, f.default
    try:
        if name in ("poly1", "poly2"):
            return parse_coeffs(raw)
        if name == "g_coeffs":
            return tuple(float(c) for c in parse_coeffs(raw))
        if name == "cache":
            return str(raw)
        if isinstance(default, bool):
            if isinstance(raw, bool):
                return raw
            s = str(raw).strip().lower()
            if s in ("1", "true", "yes", "on"):
                return True
            if s in ("0", "false", "no", "off"):
                return False
            raise ValueError(s)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc


def parse_config_file(path: str | Path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; blank lines ignored."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        out[key] = value
    return out
