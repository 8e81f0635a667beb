"""Reduced-size invariant battery behind ``nvlab selftest``.

Each suite returns ``(ok, detail)``; the ranges are small enough that the
whole battery runs in seconds. The full-size checks live in the test suite.
"""

from __future__ import annotations

import cmath
import math
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from .arith import euler_phi
from .cache import CacheCorruptError, LValueCache
from .characters import CharacterSet, epsilon_chi, even_orthogonality, phi_star
from .expsums import (
    DICoefficients,
    DIParams,
    bump_weight,
    di_quintuple_sum,
    kloosterman,
    ramanujan,
    reciprocity_defect,
)
from .lvalue import lvalue_direct, lvalue_sq_afe
from .optimizer import c_eta_exact, optimize, theta_max_exact
from .weights import WeightConfig, fourier_b, phi_split, psi_bump

__all__ = ["SUITES", "run_suites"]


def _characters(rng, cache_path) -> tuple[bool, str]:
    worst = 0.0
    for q in range(1, 25):
        for m in range(1, 13):
            for n in range(1, 13):
                if math.gcd(m * n, q) == 1:
                    lhs, rhs = even_orthogonality(q, m, n)
                    worst = max(worst, abs(lhs - rhs))
    for q in range(1, 121):
        brute = sum(1 for chi in CharacterSet(q) if chi.is_primitive)
        if brute != phi_star(q):
            return False, f"phi* mismatch at q={q}"
    eps_dev = max(
        abs(abs(epsilon_chi(chi)) - 1) for q in range(3, 60) for chi in CharacterSet(q) if chi.is_primitive
    )
    ok = worst < 1e-9 and eps_dev < 1e-10
    return ok, f"orthogonality max err {worst:.1e}, |eps|-1 max {eps_dev:.1e}"


def _lvalue(rng, cache_path) -> tuple[bool, str]:
    worst = 0.0
    for q in range(3, 41):
        for chi in CharacterSet(q):
            if chi.is_even and chi.is_primitive:
                a = lvalue_sq_afe(chi)
                d = abs(lvalue_direct(chi)) ** 2
                worst = max(worst, abs(a - d) / max(d, 1e-3))
    return worst <= 1e-6, f"AFE vs direct, max scaled err {worst:.1e} (q <= 40)"


def _kloosterman_naive(m: int, n: int, c: int) -> complex:
    tot = 0j
    for x in range(c):
        if math.gcd(x, c) == 1:
            xb = pow(x, -1, c) if c > 1 else 0
            tot += cmath.exp(2j * math.pi * ((m * x + n * xb) % c) / c)
    return tot


def _expsums(rng, cache_path) -> tuple[bool, str]:
    kl = 0.0
    for _ in range(300):
        c = int(rng.integers(1, 121))
        m, n = (int(v) for v in rng.integers(-500, 500, size=2))
        kl = max(kl, abs(kloosterman(m, n, c) - _kloosterman_naive(m, n, c)))
    ram_ok = all(
        abs(ramanujan(w, k)) <= math.gcd(k, w) + 1e-9 for w in range(1, 61) for k in range(-60, 61)
    )
    rec_ok = all(
        reciprocity_defect(x, y) == 1 for x in range(1, 120) for y in range(1, 120) if math.gcd(x, y) == 1
    )
    p = DIParams(C=6, D=5, N=8, R=4, S=3)
    b = DICoefficients({(n, r, s): float(rng.normal()) for n in range(1, 9) for r in (5, 7) for s in (4, 5)})
    g = bump_weight(p)
    val, _ = di_quintuple_sum(b, g, p)
    ref = 0j
    for c in range(6, 13):
        for d in range(5, 11):
            for (n, r, s), bv in b.b.items():
                if math.gcd(r * d, s * c) == 1:
                    inv = pow(r * d, -1, s * c)
                    ref += bv * g(c, d, n, r, s) * cmath.exp(2j * math.pi * n * inv / (s * c))
    di = abs(val - ref) / max(abs(ref), 1e-300)
    ok = kl < 1e-9 and ram_ok and rec_ok and di < 1e-9
    return ok, f"kloosterman err {kl:.1e}, ramanujan bound {ram_ok}, reciprocity {rec_ok}, quintuple rel err {di:.1e}"


def _weights(rng, cache_path) -> tuple[bool, str]:
    ok = fourier_b(10, 0) == 1.0
    for T in (4, 10, 50):
        ok &= all(fourier_b(T, k) >= 4 / math.pi**2 - 1e-15 for k in range(1, int(T // 2) + 1))
    cfg = WeightConfig(Q=10.0, eta1=1.0, eps_split=1.0)  # T = 10, K = 100
    ts = np.linspace(0.5, 1.5, 1000)
    sup = max(abs(phi_split(cfg, t)[1]) for t in ts)
    bound = 2 * cfg.T**2 * psi_bump(1.0) / (math.pi**2 * cfg.K)
    ok &= sup <= bound
    return bool(ok), f"sup|Phi_2| {sup:.4g} <= {bound:.4g}"


def _optimizer(rng, cache_path) -> tuple[bool, str]:
    worst = 0.0
    for d in (1, 4, 8):
        for k in range(1, 10):
            th = k / 20
            r = optimize(d, th, th)
            worst = max(worst, abs(r.ratio - 2 * th / (1 + 2 * th)))
            if r.p1 != [0, 1] + [0] * (len(r.p1) - 2) or r.descent_max_dev > 1e-7:
                return False, f"argmax not P=x at d={d}"
    ident = all(
        c_eta_exact(e1, e2) + (2 * theta_max_exact(e1, e2)) / (1 + 2 * theta_max_exact(e1, e2)) == Fraction(1, 2)
        for e1, e2 in ((0, 0), (0.001, 0.001), (0.005, 0.02))
    )
    return worst < 1e-9 and ident, f"ratio max err {worst:.1e}, c_eta identity {ident}"


def _cache(rng, cache_path) -> tuple[bool, str]:
    if cache_path is not None and Path(cache_path).exists():
        try:
            existing = LValueCache(cache_path, strict=True)
        except CacheCorruptError as exc:
            return False, str(exc)
        for e in list(existing._entries.values())[:50]:
            chi = CharacterSet(e.q)[e.index]
            if abs(lvalue_direct(chi) - e.value) > 1e-9 * max(1.0, abs(e.value)):
                return False, f"stale value for q={e.q} index={e.index}"
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "lv.jsonl"
        c = LValueCache(path, version="selftest")
        cs = CharacterSet(13)
        idx = np.nonzero(cs.primitive_mask)[0]
        vals = np.array([lvalue_direct(cs[i]) for i in idx])
        ev = cs.even_primitive_mask[idx]
        c.store_modulus(13, cs, idx[ev], idx[~ev], vals[ev], vals[~ev])
        c.checkpoint()
        back = LValueCache(path).lookup_modulus(13, np.concatenate([idx[ev], idx[~ev]]))
        ok = back is not None and np.array_equal(back, np.concatenate([vals[ev], vals[~ev]]))
    return bool(ok), "round trip bit-identical" if ok else "round trip mismatch"


SUITES: dict[str, Callable] = {
    "characters": _characters,
    "lvalue": _lvalue,
    "expsums": _expsums,
    "weights": _weights,
    "optimizer": _optimizer,
    "cache": _cache,
}


def run_suites(names=None, seed: int = 0, cache_path=None, echo=print) -> bool:
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    all_ok = True
    for name in names:
        rng = np.random.default_rng(seed)
        try:
            ok, detail = SUITES[name](rng, cache_path)
        except Exception as exc:  # a crashing suite is a failing suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= ok
        echo(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return all_ok
