"""Small multiplicative-function toolkit shared by the other modules.

Scalar helpers use trial division (moduli here stay below ~1e7); the
``*_sieve`` functions return numpy tables for vectorized sweeps.
"""

from __future__ import annotations

import numbers
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``n`` as ``((p, k), ...)`` with ``p`` ascending."""
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def euler_phi(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(k > 1 for _, k in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, k in factorize(n):
        divs = [d * p**e for d in divs for e in range(k + 1)]
    return sorted(divs)


def divides(w: int, x: int) -> bool:
    """``w | x`` with the convention that every ``w`` divides 0."""
    return x % w == 0


def gcd0(k: int, w: int) -> int:
    """gcd with ``gcd(0, w) = w``; sign of ``k`` ignored."""
    return gcd(abs(k), w)


def mod_inverse(x: int, m: int) -> int:
    """Inverse of ``x`` modulo ``m`` in ``[0, m)``; ``m = 1`` gives 0."""
    if m == 1:
        return 0
    return pow(x, -1, m)


def mobius_sieve(n: int) -> np.ndarray:
    """``mu[k]`` for ``0 <= k <= n`` (``mu[0] = 0``)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    is_comp = np.zeros(n + 1, dtype=bool)
    for p in range(2, n + 1):
        if is_comp[p]:
            continue
        is_comp[2 * p :: p] = True
        mu[p::p] *= -1
        if p * p <= n:
            mu[p * p :: p * p] = 0
    return mu


def phi_sieve(n: int) -> np.ndarray:
    """Euler phi table for ``0 <= k <= n`` (``phi[0] = 0``)."""
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def primitive_root_prime_power(p: int, k: int) -> int:
    """A generator of the cyclic group ``(Z/p^k Z)^x`` for odd prime ``p``."""
    order = p - 1
    qs = [r for r, _ in factorize(order)] if order > 1 else []
    g = 2 if p > 2 else 1
    while True:
        if all(pow(g, order // r, p) != 1 for r in qs):
            break
        g += 1
    if k >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g % (p**k) if p**k > 1 else 0


def to_fraction(x) -> Fraction:
    """Exact rational from an integer, Fraction, float (via its shortest repr) or string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, numbers.Real):
        return Fraction(repr(float(x)))
    return Fraction(str(x).strip())
