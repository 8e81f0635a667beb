"""Both kernel backends against each other and against plain references."""

import cmath
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from nvlab import _kernels

BACKENDS = [pytest.param(_kernels.fallback, id="python")]
if _kernels.compiled is not None:
    BACKENDS.append(pytest.param(_kernels.compiled, id="compiled"))


@pytest.fixture(params=BACKENDS)
def k(request):
    return request.param


def test_kloosterman(k):
    rng = np.random.default_rng(3)
    for m, n, c in rng.integers(-10**9, 10**9, size=(200, 3)):
        c = int(abs(c)) % 300 + 1
        ref = sum(
            cmath.exp(2j * math.pi * ((int(m) * x + int(n) * pow(x, -1, c)) % c) / c)
            for x in range(1, c + 1)
            if math.gcd(x, c) == 1
        )
        assert abs(k.kloosterman(int(m), int(n), c) - ref) < 1e-9


def test_kloosterman_reduces_huge_arguments(k):
    big = 4 * 10**18
    for c in (7, 60, 97):
        assert abs(k.kloosterman(big + 3 * c, -big, c) - k.kloosterman(big % c, -big % c, c)) < 1e-12


def test_ramanujan(k):
    for w in range(1, 80):
        for kk in range(-40, 41):
            ref = sum(math.cos(2 * math.pi * (b * kk % w) / w) for b in range(1, w + 1) if math.gcd(b, w) == 1)
            assert k.ramanujan(w, kk) == pytest.approx(ref, abs=1e-9)


def test_hurwitz(k):
    import mpmath

    a = np.linspace(1e-3, 1, 97)
    ref = np.array([float(mpmath.zeta(0.5, x)) for x in a])
    np.testing.assert_allclose(k.hurwitz_half(a), ref, rtol=1e-13, atol=1e-13)


def test_afe_sum_against_double_loop(k):
    rng = np.random.default_rng(5)
    vals = np.exp(2j * np.pi * rng.random(11))
    vals[0] = 0
    kmax = 60
    w = rng.random(kmax + 1)
    ref = sum(vals[m % 11] * np.conj(vals[n % 11]) * w[m * n] for m in range(1, kmax + 1) for n in range(1, kmax // m + 1))
    assert abs(k.afe_sum(vals, w, kmax) - ref) < 1e-11


def test_di_sum_against_loop(k):
    rng = np.random.default_rng(9)
    cs = np.arange(5, 11, dtype=np.int64)
    ds = np.arange(3, 8, dtype=np.int64)
    keys = [(n, r, s) for n in (1, 2, 3) for r in (4, 5) for s in (2, 3)]
    ns, rs, ss = (np.array(col, dtype=np.int64) for col in zip(*keys))
    bs = rng.normal(size=len(keys))
    gv = rng.normal(size=(len(cs), len(ds), len(keys))) + 0j
    for q in (1, 7):
        ref = 0j
        for i, c in enumerate(cs):
            for j, d in enumerate(ds):
                for t, (n, r, s) in enumerate(keys):
                    if math.gcd(q * r * int(d), s * int(c)) == 1:
                        inv = pow(r * int(d), -1, s * int(c))
                        ref += bs[t] * gv[i, j, t] * cmath.exp(2j * math.pi * (n * inv % (s * c)) / (s * c))
        assert abs(k.di_sum(cs, ds, ns, rs, ss, bs, gv, q) - ref) < 1e-10


def test_read_only_inputs_accepted(k):
    a = np.linspace(0.1, 1, 5)
    a.flags.writeable = False
    assert np.all(np.isfinite(k.hurwitz_half(a)))


def test_env_var_forces_fallback():
    code = "import nvlab._kernels as k; print(k.BACKEND)"
    env = {**os.environ, "NVLAB_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
