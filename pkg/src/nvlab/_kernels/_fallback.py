"""numpy / pure-Python versions of the hot kernels.

Same signatures and semantics as the compiled ``_core`` module. Used when
the extension is not built or ``NVLAB_PURE_PYTHON=1`` is set.
"""

from __future__ import annotations

import math
from math import gcd

import numpy as np

# Bernoulli numbers B_2 .. B_12
_B2K = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730)
_EM_TOL = 1e-13


def _inv(x: int, m: int) -> int:
    return 0 if m == 1 else pow(x, -1, m)


def _fsum_complex(re, im) -> complex:
    return complex(math.fsum(re), math.fsum(im))


def kloosterman(m: int, n: int, c: int) -> complex:
    if c == 1:
        return 1.0 + 0.0j
    xs = [x for x in range(1, c) if gcd(x, c) == 1]
    num = np.array([(m * x + n * _inv(x, c)) % c for x in xs], dtype=np.float64)
    ang = 2 * np.pi * num / c
    return _fsum_complex(np.cos(ang), np.sin(ang))


def ramanujan(w: int, k: int) -> float:
    if w == 1:
        return 1.0
    b = np.arange(1, w, dtype=np.int64)
    b = b[np.gcd(b, w) == 1]
    ang = 2 * np.pi * ((b * (k % w)) % w) / w
    return math.fsum(np.cos(ang))


def di_sum(cs, ds, ns, rs, ss, bs, gvals, q: int) -> complex:
    """Quintuple exponential sum over a precomputed (c, d, coefficient) lattice.

    ``gvals[i, j, t]`` is the weight at ``(cs[i], ds[j])`` and coefficient
    ``t``; coefficients must arrive grouped by ``(r, s)`` so one modular
    inverse serves every ``n`` in the group.
    """
    cs = [int(v) for v in cs]
    ds = [int(v) for v in ds]
    ns = np.asarray(ns, dtype=np.int64)
    rs = [int(v) for v in rs]
    ss = [int(v) for v in ss]
    bs = np.asarray(bs, dtype=np.float64)
    nt = len(rs)
    # group boundaries
    starts = [0] + [t for t in range(1, nt) if (rs[t], ss[t]) != (rs[t - 1], ss[t - 1])] + [nt]
    re_parts: list[float] = []
    im_parts: list[float] = []
    for i, c in enumerate(cs):
        for j, d in enumerate(ds):
            for a, b in zip(starts[:-1], starts[1:]):
                r, s = rs[a], ss[a]
                mod = s * c
                if gcd(q * r * d, mod) != 1:
                    continue
                inv = _inv(r * d, mod)
                num = (ns[a:b] * inv) % mod
                ang = 2 * np.pi * num / mod
                w = bs[a:b] * gvals[i, j, a:b]
                term = w * (np.cos(ang) + 1j * np.sin(ang))
                re_parts.extend(term.real.tolist())
                im_parts.extend(term.imag.tolist())
    return _fsum_complex(re_parts, im_parts)


def _em_cutoff(alpha_min: float) -> int:
    # first omitted Euler-Maclaurin term at s = 1/2 is the B_12 term
    N = 1
    while True:
        x = N + alpha_min
        poch = math.gamma(0.5 + 11) / math.gamma(0.5)
        term = abs(_B2K[5]) / math.factorial(12) * poch * x ** (-0.5 - 11)
        if term < _EM_TOL:
            return N
        N += 1


def hurwitz_half(alphas) -> np.ndarray:
    """zeta(1/2, alpha) for each alpha in (0, 1] by Euler-Maclaurin."""
    a = np.asarray(alphas, dtype=np.float64)
    N = _em_cutoff(0.0)
    acc = np.zeros_like(a)
    for n in range(N):
        acc += (n + a) ** -0.5
    x = N + a
    s = 0.5
    acc += x ** (1 - s) / (s - 1) + 0.5 * x**-s
    poch = s  # (s)_{2k-1}
    power = x ** (-s - 1)
    for k in range(1, 6):
        acc += _B2K[k - 1] / math.factorial(2 * k) * poch * power
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        power = power / (x * x)
    return acc


def afe_sum(values, weights, kmax: int) -> complex:
    """``sum_{mn <= kmax} chi(m) conj(chi(n)) weights[mn]``; values indexed mod q."""
    values = np.asarray(values, dtype=np.complex128)
    weights = np.asarray(weights, dtype=np.float64)
    q = len(values)
    re_parts: list[float] = []
    im_parts: list[float] = []
    for m in range(1, kmax + 1):
        cm = values[m % q]
        if cm == 0:
            continue
        n = np.arange(1, kmax // m + 1)
        t = cm * np.conj(values[n % q]) * weights[m * n]
        re_parts.extend(t.real.tolist())
        im_parts.extend(t.imag.tolist())
    return _fsum_complex(re_parts, im_parts)
