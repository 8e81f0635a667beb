"""Compiled core vs numpy fallback on the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints best-of-N wall time per kernel for both backends, the speedup and
the largest difference between their outputs.
"""

import argparse
import time

import numpy as np

from nvlab import _kernels
from nvlab.characters import CharacterSet


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    rng = np.random.default_rng(1)
    alphas = np.arange(1, 20001) / 20001
    chi = next(c for c in CharacterSet(1009) if c.is_even and not c.is_principal)
    kmax = 1009 * 7
    w = np.zeros(kmax + 1)
    w[1:] = rng.random(kmax) / np.sqrt(np.arange(1, kmax + 1))
    cs = np.arange(17, 33, dtype=np.int64)
    ds = np.arange(17, 33, dtype=np.int64)
    keys = [(n, r, s) for n in range(1, 17) for r in range(17, 33) for s in range(17, 25)]
    ns, rs, ss = (np.array(col, dtype=np.int64) for col in zip(*keys))
    bs = rng.normal(size=len(keys))
    gv = np.ones((len(cs), len(ds), len(keys)), dtype=np.complex128)
    trip = [(int(m), int(n), int(c)) for m, n, c in rng.integers(1, 2000, size=(300, 3))]
    return {
        "hurwitz_half (20k points)": lambda k: k.hurwitz_half(alphas),
        "afe_sum (q=1009)": lambda k: k.afe_sum(chi.values, w, kmax),
        "di_sum (16^2 x 2048 terms)": lambda k: k.di_sum(cs, ds, ns, rs, ss, bs, gv, 1),
        "kloosterman (300 triples)": lambda k: np.array([k.kloosterman(*t) for t in trip]),
        "ramanujan (w, k <= 400)": lambda k: np.array(
            [k.ramanujan(w_, k_) for w_ in range(1, 401, 7) for k_ in range(1, 401, 13)]
        ),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels.compiled is None:
        print("compiled core not built; only the fallback is available")
    print(f"{'kernel':32s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s} {'max diff':>9s}")
    for name, fn in cases().items():
        tp, outp = best_of(lambda: fn(_kernels.fallback), args.repeat)
        if _kernels.compiled is None:
            print(f"{name:32s} {tp:10.4f}")
            continue
        tc, outc = best_of(lambda: fn(_kernels.compiled), args.repeat)
        diff = float(np.max(np.abs(np.asarray(outp) - np.asarray(outc))))
        print(f"{name:32s} {tp:10.4f} {tc:11.4f} {tp / tc:7.1f}x {diff:9.1e}")


if __name__ == "__main__":
    main()
