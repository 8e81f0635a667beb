"""The two-piece mollifier M = M_IS + M_MV and the second-moment lambda coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import floor, log, sqrt
from typing import Sequence

import numpy as np

from .arith import mobius_sieve, to_fraction
from .characters import Character, CharacterSet, epsilon_chi

__all__ = [
    "PolySpec",
    "MollifierSpec",
    "to_fraction",
    "p_bracket",
    "m_is",
    "m_mv",
    "lambda_coeff",
    "lambda_coeff_exact",
    "mollifier_terms",
]


@dataclass(frozen=True)
class PolySpec:
    """P(x) = sum_k coeffs[k] x^k with P(0) = 0 and P(1) = 1 exactly."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence):
        fr = tuple(to_fraction(c) for c in coeffs)
        if not fr or fr[0] != 0:
            raise ValueError("P(0) must be 0 (constant coefficient zero)")
        if sum(fr) != 1:
            raise ValueError(f"P(1) must be 1, coefficients sum to {sum(fr)}")
        while len(fr) > 2 and fr[-1] == 0:
            fr = fr[:-1]
        object.__setattr__(self, "coeffs", fr)

    @classmethod
    def linear(cls) -> PolySpec:
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        out = 0.0 * np.asarray(x, dtype=np.float64)
        for c in reversed(self.coeffs):
            out = out * x + float(c)
        return out

    def at_one(self) -> Fraction:
        return sum(self.coeffs, Fraction(0))

    def derivative_sq_integral(self) -> Fraction:
        """int_0^1 P'(x)^2 dx, exactly."""
        d = [k * c for k, c in enumerate(self.coeffs)][1:]  # P' coefficients, degree i -> d[i]
        return sum(
            (d[i] * d[j] / (i + j + 1) for i in range(len(d)) for j in range(len(d))),
            Fraction(0),
        )

    def as_floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]


@dataclass(frozen=True)
class MollifierSpec:
    theta1: float
    theta2: float
    P1: PolySpec
    P2: PolySpec
    Q: float

    def __post_init__(self):
        for th in (self.theta1, self.theta2):
            if not 0 < th < 0.5:
                raise ValueError(f"theta must lie in (0, 1/2), got {th}")
        if self.Q < 1:
            raise ValueError("Q must be >= 1")

    @property
    def y1(self) -> float:
        return self.Q**self.theta1

    @property
    def y2(self) -> float:
        return self.Q**self.theta2

    @cached_property
    def terms1(self) -> tuple[np.ndarray, np.ndarray]:
        return mollifier_terms(self.P1, self.y1)

    @cached_property
    def terms2(self) -> tuple[np.ndarray, np.ndarray]:
        return mollifier_terms(self.P2, self.y2)


def p_bracket(P: PolySpec, y: float, ell: int) -> float:
    """P(log(y / ell) / log y)."""
    if y <= 1:
        raise ValueError("p_bracket needs y > 1")
    if not 1 <= ell <= y:
        raise ValueError(f"ell={ell} outside [1, y={y}]")
    return float(P(log(y / ell) / log(y)))


def mollifier_terms(P: PolySpec, y: float) -> tuple[np.ndarray, np.ndarray]:
    """Squarefree ``ell <= y`` with weights ``mu(ell) ell^{-1/2} P[ell]``."""
    top = max(1, floor(y))
    if top < 2:
        return np.array([1], dtype=np.int64), np.array([1.0])
    mu = mobius_sieve(top)
    ells = np.nonzero(mu)[0].astype(np.int64)
    coef = np.array([mu[l] / sqrt(l) * p_bracket(P, y, int(l)) for l in ells])
    return ells, coef


def _sum_terms(chi: Character, ells: np.ndarray, coef: np.ndarray, conj: bool) -> complex:
    vals = chi.values[ells % chi.modulus]
    if conj:
        vals = np.conj(vals)
    return complex(np.sum(coef * vals))


def m_is(chi: Character, spec: MollifierSpec) -> complex:
    ells, coef = spec.terms1
    return _sum_terms(chi, ells, coef, conj=False)


def m_mv(chi: Character, spec: MollifierSpec) -> complex:
    """eps(conj chi) * sum_{ell <= y2} mu(ell) conj(chi(ell)) ell^{-1/2} P2[ell]."""
    if not chi.is_primitive:
        raise ValueError("M_MV needs a primitive character")
    ells, coef = spec.terms2
    return epsilon_chi(chi.conj()) * _sum_terms(chi, ells, coef, conj=True)


def mollifier_batch(cs: CharacterSet, mask: np.ndarray, eps_conj: np.ndarray, spec: MollifierSpec):
    """M_IS and M_MV for the masked characters of ``cs`` at once."""
    out = []
    for (ells, coef), conj in ((spec.terms1, False), (spec.terms2, True)):
        acc = np.zeros(int(mask.sum()), dtype=np.complex128)
        for l, c in zip(ells, coef):
            v = cs.values_at(int(l), mask)
            acc += c * (np.conj(v) if conj else v)
        out.append(acc)
    return out[0], eps_conj * out[1]


def lambda_coeff_exact(P: PolySpec, theta) -> Fraction:
    th = to_fraction(theta)
    if th <= 0:
        raise ValueError("theta must be positive")
    return P.at_one() ** 2 + P.derivative_sq_integral() / th


def lambda_coeff(P: PolySpec, theta) -> float:
    """P(1)^2 + (1/theta) int_0^1 P'(x)^2 dx."""
    return float(lambda_coeff_exact(P, theta))
