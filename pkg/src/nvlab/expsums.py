"""Kloosterman and Ramanujan sums, the reciprocity defect, and the
Deshouillers-Iwaniec / Drappeau quintuple sum with its bound quantity."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, sqrt
from typing import Callable

import numpy as np

from . import _kernels

__all__ = [
    "kloosterman",
    "ramanujan",
    "reciprocity_defect",
    "DIParams",
    "DICoefficients",
    "di_bound",
    "di_quintuple_sum",
    "bump_weight",
]


def kloosterman(m: int, n: int, c: int) -> complex:
    """S(m, n; c) = sum over units x mod c of e((m x + n xbar) / c)."""
    if c < 1:
        raise ValueError(f"modulus must be >= 1, got {c}")
    return _kernels.kloosterman(int(m), int(n), int(c))


def ramanujan(w: int, k: int) -> float:
    """c_w(k) = sum over units b mod w of e(b k / w)."""
    if w < 1:
        raise ValueError(f"modulus must be >= 1, got {w}")
    return _kernels.ramanujan(int(w), int(k))


def reciprocity_defect(x: int, y: int) -> int:
    """``(xbar x + ybar y - 1) / (x y)`` in exact integer arithmetic.

    ``xbar`` is the inverse of x mod y taken in ``[1, y]`` and ``ybar`` the
    inverse of y mod x in ``[1, x]``. The quotient is always 1.
    """
    if x < 1 or y < 1:
        raise ValueError("x and y must be positive")
    if gcd(x, y) != 1:
        raise ValueError(f"gcd({x}, {y}) != 1")
    xbar = pow(x, -1, y) if y > 1 else 0
    ybar = pow(y, -1, x) if x > 1 else 0
    xbar = xbar or y
    ybar = ybar or x
    num = xbar * x + ybar * y - 1
    quot, rem = divmod(num, x * y)
    if rem:
        raise ArithmeticError(f"reciprocity defect not integral for ({x}, {y})")
    return quot


@dataclass(frozen=True)
class DIParams:
    C: float
    D: float
    N: float
    R: float
    S: float
    q: int = 1
    c0: int = 1
    d0: int = 1

    def __post_init__(self):
        for name in ("C", "D", "N", "R", "S"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if gcd(self.c0 * self.d0, self.q) != 1:
            raise ValueError("need gcd(c0 d0, q) = 1")


@dataclass
class DICoefficients:
    """Sparse coefficients ``b[(n, r, s)]``."""

    b: dict[tuple[int, int, int], float] = field(default_factory=dict)

    def norm2(self) -> float:
        return sqrt(sum(v * v for v in self.b.values()))

    def check_support(self, p: DIParams) -> None:
        for n, r, s in self.b:
            if not (0 < n <= p.N and p.R < r <= 2 * p.R and p.S < s <= 2 * p.S):
                raise ValueError(f"coefficient ({n}, {r}, {s}) outside (0,N]x(R,2R]x(S,2S]")


def di_bound(p: DIParams) -> float:
    """K(C, D, N, R, S) with the progression modulus q in the first addend."""
    C, D, N, R, S, q = p.C, p.D, p.N, p.R, p.S, p.q
    k2 = q * C * S * (R * S + N) * (C + R * D) + C * C * D * S * sqrt((R * S + N) * R) + D * D * N * R
    return sqrt(k2)


def bump_weight(p: DIParams) -> Callable:
    """A smooth product weight supported in [C, 2C] x [D, 2D] in (c, d)."""

    def bump(x, lo, hi):
        x = np.asarray(x, dtype=np.float64)
        u = (2 * x - (lo + hi)) / (hi - lo)
        out = np.zeros(np.broadcast(x).shape)
        inside = np.abs(u) < 1
        out[inside] = np.exp(1 - 1 / (1 - u[inside] ** 2))
        return out

    def g(c, d, n, r, s):
        return bump(c, p.C, 2 * p.C) * bump(d, p.D, 2 * p.D) * (1 + 0 * (n + r + s))

    return g


def _lattice(lo: float, hi: float, q: int, res: int) -> np.ndarray:
    start = int(np.ceil(lo))
    vals = np.arange(start, int(np.floor(hi)) + 1, dtype=np.int64)
    return vals[(vals - res) % q == 0]


def di_quintuple_sum(
    coeffs: DICoefficients, weight: Callable, params: DIParams
) -> tuple[complex, float]:
    """Evaluate the five-fold sum and the diagnostic ratio ``|sum| / (K ||b||)``.

    Sum over ``c = c0, d = d0 mod q`` in the weight's ``[C, 2C] x [D, 2D]``
    box with ``gcd(q r d, s c) = 1`` of
    ``b[n, r, s] g(c, d, n, r, s) e(n * inv(r d, s c) / (s c))``.
    ``weight`` is called once with broadcastable numpy arrays.
    """
    coeffs.check_support(params)
    if not coeffs.b:
        return 0j, 0.0
    p = params
    cs = _lattice(p.C, 2 * p.C, p.q, p.c0)
    ds = _lattice(p.D, 2 * p.D, p.q, p.d0)
    keys = sorted(coeffs.b, key=lambda k: (k[1], k[2], k[0]))
    ns = np.array([k[0] for k in keys], dtype=np.int64)
    rs = np.array([k[1] for k in keys], dtype=np.int64)
    ss = np.array([k[2] for k in keys], dtype=np.int64)
    bs = np.array([coeffs.b[k] for k in keys], dtype=np.float64)
    if len(cs) == 0 or len(ds) == 0:
        return 0j, 0.0
    gv = weight(
        cs[:, None, None].astype(np.float64),
        ds[None, :, None].astype(np.float64),
        ns[None, None, :].astype(np.float64),
        rs[None, None, :].astype(np.float64),
        ss[None, None, :].astype(np.float64),
    )
    gv = np.array(np.broadcast_to(np.asarray(gv, dtype=np.complex128), (len(cs), len(ds), len(keys))), order="C")
    total = _kernels.di_sum(cs, ds, ns, rs, ss, bs, gv, p.q)
    denom = di_bound(p) * coeffs.norm2()
    return total, abs(total) / denom if denom > 0 else 0.0
