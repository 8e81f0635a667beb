"""Averaging weights over the modulus: bump Psi, periodic tent H_T and its
Fourier split Phi = Phi_1 + Phi_2, plus the parameter constraints."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .arith import to_fraction

__all__ = [
    "WeightConfig",
    "psi_bump",
    "h_tent",
    "fourier_b",
    "phi_split",
    "phi_weight",
    "phi_at_modulus",
    "tail_bound",
    "validate_config",
    "PSI_TAG",
]

PSI_TAG = "exp(-1/(1-4(t-1)^2)) on |t-1|<1/2"


@dataclass(frozen=True)
class WeightConfig:
    Q: float
    eta1: float = 0.0
    eta2: float = 0.0
    eps_split: float = 0.05
    a: int = 1
    D: int = 1

    def __post_init__(self):
        if self.Q < 1:
            raise ValueError("Q must be >= 1")
        if self.eta1 < 0 or self.eta2 < 0:
            raise ValueError("eta1, eta2 must be >= 0")
        if self.eps_split <= 0:
            raise ValueError("eps_split must be > 0")
        if not (1 <= self.a <= self.D):
            raise ValueError("need 1 <= a <= D")

    @property
    def T(self) -> float:
        return self.Q**self.eta1

    @property
    def K(self) -> int:
        return math.ceil(self.Q ** (self.eta1 + self.eps_split))


def psi_bump(t):
    """exp(-1/(1 - 4(t-1)^2)) for |t - 1| < 1/2, else 0."""
    t = np.asarray(t, dtype=np.float64)
    u = 1 - 4 * (t - 1) ** 2
    out = np.zeros(t.shape)
    inside = u > 0
    out[inside] = np.exp(-1 / u[inside])
    return float(out) if out.ndim == 0 else out


def h_tent(T: float, t):
    """Period-1 tent: T(1 - T|t|) for |t| <= 1/T, else 0, on [-1/2, 1/2]."""
    if T < 1:
        raise ValueError("T must be >= 1")
    t = np.asarray(t, dtype=np.float64)
    r = np.abs(t - np.round(t))
    out = np.where(r <= 1 / T, T * (1 - T * r), 0.0)
    return float(out) if out.ndim == 0 else out


def fourier_b(T: float, k: int) -> float:
    """Fourier coefficient b(k) of the tent (exact for T >= 2)."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if k == 0:
        return 1.0
    return T * T * math.sin(math.pi * k / T) ** 2 / (math.pi**2 * k * k)


def phi_weight(cfg: WeightConfig, t):
    """Phi(t) = Psi(t) H_T(t)."""
    return psi_bump(t) * h_tent(cfg.T, t)


def phi_at_modulus(cfg: WeightConfig, q: int) -> float:
    """Phi(q/Q) with the tent support tested as ``T |q - Q| < Q`` (no rounding at the edge)."""
    off = abs(q - cfg.Q)
    if not cfg.T * off < cfg.Q:
        return 0.0
    return float(psi_bump(q / cfg.Q)) * cfg.T * (1 - cfg.T * off / cfg.Q)


def phi_split(cfg: WeightConfig, t) -> tuple[complex, complex, float]:
    """(Phi_1(t), Phi_2(t), Phi(t)) with Phi_1 the |k| <= K Fourier part."""
    T, K = cfg.T, cfg.K
    psi = psi_bump(t)
    phi = psi * h_tent(T, t)
    k = np.arange(1, K + 1)
    b = T * T * np.sin(np.pi * k / T) ** 2 / (np.pi**2 * k * k)
    # b(k) = b(-k): e(kt) + e(-kt) = 2 cos(2 pi k t)
    partial = 1.0 + 2.0 * math.fsum(b * np.cos(2 * np.pi * k * t))
    phi1 = complex(psi * partial)
    return phi1, complex(phi - phi1), float(phi)


def tail_bound(cfg: WeightConfig) -> float:
    """Bound 2 T^2 / (pi^2 K) on sum_{|k| > K} |b(k)|."""
    return 2 * cfg.T**2 / (math.pi**2 * cfg.K)


def validate_config(cfg: WeightConfig, spec=None) -> list[str]:
    """Names of violated constraints (empty when admissible)."""
    out = []
    e1, e2 = to_fraction(cfg.eta1), to_fraction(cfg.eta2)
    if not 7 * e1 + e2 < Fraction(1, 12):
        out.append(f"7*eta1+eta2<1/12 fails ({float(7 * e1 + e2):.6g} >= 1/12)")
    if cfg.D > cfg.Q**cfg.eta2 * (1 + 1e-12):
        out.append(f"D<=Q^eta2 fails (D={cfg.D}, Q^eta2={cfg.Q ** cfg.eta2:.6g})")
    if gcd(cfg.a, cfg.D) != 1:
        out.append(f"gcd(a,D)=1 fails (a={cfg.a}, D={cfg.D})")
    if spec is not None:
        bound = Fraction(1, 2) - 41 * e1 - 5 * e2
        for name, th in (("theta1", spec.theta1), ("theta2", spec.theta2)):
            if not to_fraction(th) < bound:
                out.append(f"{name}<1/2-41*eta1-5*eta2 fails ({th} >= {float(bound):.6g})")
    return out
