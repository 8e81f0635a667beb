import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nvlab.characters import CharacterSet
from nvlab.lvalue import (
    KernelConfig,
    KernelConvergenceError,
    LValueRecord,
    ZKernel,
    complex_gamma,
    hurwitz_zeta_half,
    lvalue_direct,
    lvalue_sq_afe,
    lvalues_for_modulus,
    z_kernel,
)
from nvlab.lvalue import get_kernel

ZETA_HALF = -1.46035450880958681
# (1 - 4 s^2)^4: also even, G(0) = 1, vanishes to order four at 1/2
QUARTIC_G = (1.0, 0.0, -16.0, 0.0, 96.0, 0.0, -256.0, 0.0, 256.0)


def quadratic_mod5():
    return next(c for c in CharacterSet(5) if c.is_even and not c.is_principal)


def even_primitive(q):
    return [c for c in CharacterSet(q) if c.is_even and c.is_primitive]


def z_by_mpmath(x, c0=1.0):
    mpmath.mp.dps = 30

    def f(t):
        s = mpmath.mpc(c0, t)
        g = (1 - 4 * s**2) ** 2
        return (mpmath.gamma(s / 2 + 0.25) / mpmath.gamma(0.25)) ** 2 * g / s * (mpmath.pi * x) ** (-s)

    return float(mpmath.re(mpmath.quad(f, [-mpmath.inf, -10, 0, 10, mpmath.inf]) / (2 * mpmath.pi)))


class TestGamma:
    def test_exact_points(self):
        assert complex_gamma(1.0) == pytest.approx(1, abs=1e-14)
        assert complex_gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
        assert complex_gamma(5.0) == pytest.approx(24, rel=1e-13)

    def test_poles_rejected(self):
        for s in (0.0, -1.0, -7.0):
            with pytest.raises(ValueError):
                complex_gamma(s)

    @given(st.floats(0.2, 3.0), st.floats(-200, 200))
    def test_matches_mpmath_on_strip(self, re, im):
        want = complex(mpmath.gamma(mpmath.mpc(re, im)))
        assert abs(complex_gamma(complex(re, im)) - want) <= 1e-12 * abs(want)

    @given(st.floats(0.1, 4.0), st.floats(-50, 50))
    def test_recurrence(self, re, im):
        s = complex(re, im)
        assert complex_gamma(s + 1) == pytest.approx(s * complex_gamma(s), rel=1e-12)


class TestKernelConfig:
    def test_default_is_valid(self):
        assert KernelConfig().G(0.5) == 0

    @pytest.mark.parametrize(
        "coeffs",
        [(2.0, 0.0, -8.0), (1.0, 0.0, -4.0), (1.0, 1.0, -8.0, -4.0, 16.0)],
        ids=["G0", "simple-zero", "odd"],
    )
    def test_invalid_g_rejected(self, coeffs):
        with pytest.raises(ValueError):
            KernelConfig(g_coeffs=coeffs)

    def test_contour_left_of_pole_rejected(self):
        with pytest.raises(ValueError):
            KernelConfig(c0=-0.5)

    def test_hash_tracks_settings(self):
        assert KernelConfig().config_hash() == KernelConfig().config_hash()
        assert KernelConfig().config_hash() != KernelConfig(c0=1.5).config_hash()


class TestZKernel:
    def test_small_x_tends_to_one(self):
        assert z_kernel(1e-8) == pytest.approx(1, abs=1e-6)
        assert z_kernel(1e-6) == pytest.approx(1, abs=1e-5)

    def test_large_x_negligible(self):
        assert abs(z_kernel(100.0)) <= 1e-8

    def test_contour_independence(self):
        xs = np.geomspace(1e-4, 20, 30)
        base = z_kernel(xs)
        for c0 in (0.8, 1.5):
            np.testing.assert_allclose(z_kernel(xs, KernelConfig(c0=c0)), base, atol=1e-11)

    @pytest.mark.parametrize("x", [0.05, 0.5, 1.0, 3.0])
    def test_matches_mpmath_quadrature(self, x):
        assert z_kernel(x) == pytest.approx(z_by_mpmath(x), abs=1e-11)

    def test_truncation_point_small(self):
        k = get_kernel(KernelConfig())
        grid = np.arange(k.x_star, 60, 0.125)
        assert np.all(np.abs(k.exact(grid)) < 1e-14)

    def test_nonconvergence_reported(self):
        with pytest.raises(KernelConvergenceError):
            ZKernel(KernelConfig(h=4.0, max_halvings=1))

    def test_rejects_nonpositive_x(self):
        with pytest.raises(ValueError):
            z_kernel(0.0)

    def test_fast_table_within_budget(self):
        k = get_kernel(KernelConfig(fast=True))
        xs = np.geomspace(1e-4, k.x_star, 777)
        assert k.interp_error <= 1e-8
        np.testing.assert_allclose(k(xs), get_kernel(KernelConfig()).exact(xs), atol=1e-8)


class TestHurwitz:
    def test_zeta_half(self):
        assert hurwitz_zeta_half(1.0) == pytest.approx(ZETA_HALF, abs=1e-13)

    def test_half_shift_identity(self):
        assert hurwitz_zeta_half(0.5) == pytest.approx((math.sqrt(2) - 1) * ZETA_HALF, abs=1e-13)

    def test_decreasing(self):
        v = hurwitz_zeta_half(np.linspace(0.01, 1, 100))
        assert np.all(np.diff(v) < 0)

    @given(st.floats(1e-6, 1.0))
    def test_matches_mpmath(self, a):
        assert hurwitz_zeta_half(a) == pytest.approx(float(mpmath.zeta(0.5, a)), abs=1e-12, rel=1e-13)

    @pytest.mark.parametrize("a", [0.0, -0.1, 1.5])
    def test_domain(self, a):
        with pytest.raises(ValueError):
            hurwitz_zeta_half(a)


class TestLValues:
    def test_quadratic_mod5_both_routes(self):
        chi = quadratic_mod5()
        direct = lvalue_direct(chi)
        oracle = mpmath.dirichlet(0.5, [0, 1, -1, -1, 1])
        assert direct == pytest.approx(complex(oracle), abs=1e-13)
        assert lvalue_sq_afe(chi) == pytest.approx(abs(direct) ** 2, rel=1e-6)

    def test_preconditions(self):
        principal4 = CharacterSet(4)[0]
        odd3 = next(c for c in CharacterSet(3) if not c.is_principal)
        for chi in (principal4, odd3):
            with pytest.raises(ValueError):
                lvalue_sq_afe(chi)
        with pytest.raises(ValueError):
            lvalue_direct(CharacterSet(7)[0])

    @pytest.mark.parametrize("q", [7, 12, 13, 20])
    def test_direct_matches_mpmath(self, q):
        for chi in CharacterSet(q):
            if chi.is_principal:
                continue
            want = complex(mpmath.dirichlet(0.5, [chi(a) for a in range(q)]))
            assert lvalue_direct(chi) == pytest.approx(want, abs=1e-12)

    def test_conjugate_symmetry(self):
        cs = CharacterSet(31)
        for chi in list(cs)[1:]:
            assert lvalue_direct(chi.conj()) == pytest.approx(np.conj(lvalue_direct(chi)), abs=1e-10)

    def test_induced_character_euler_factor(self):
        # chi mod 45 induced by primitive chi_f mod 9 picks up (1 - chi_f(5) 5^{-1/2})
        big, small = CharacterSet(45), CharacterSet(9)
        for chi in big:
            if chi.conductor != 9:
                continue
            prim = next(p for p in small if all(abs(p(n) - chi(n)) < 1e-12 for n in range(45) if math.gcd(n, 45) == 1))
            want = lvalue_direct(prim) * (1 - prim(5) / math.sqrt(5))
            assert lvalue_direct(chi) == pytest.approx(want, abs=1e-11)

    def test_batch_matches_single(self):
        cs = CharacterSet(60)
        batch = lvalues_for_modulus(cs)
        for i in range(1, len(cs)):
            assert batch[i] == pytest.approx(lvalue_direct(cs[i]), abs=1e-12)

    def test_truncation_robust(self):
        k = get_kernel(KernelConfig())
        chis = [c for q in range(5, 60) for c in even_primitive(q)][::7][:20]
        for chi in chis:
            a, b = lvalue_sq_afe(chi), lvalue_sq_afe(chi, x_star=2 * k.x_star)
            assert abs(a - b) < 1e-9 and a >= -1e-8

    def test_independent_of_g(self):
        cfg = KernelConfig(g_coeffs=QUARTIC_G)
        for q in (5, 13, 24, 37, 61):
            for chi in even_primitive(q):
                assert lvalue_sq_afe(chi, cfg) == pytest.approx(lvalue_sq_afe(chi), rel=1e-6, abs=1e-9)

    def test_record_rejects_negative(self):
        LValueRecord(5, 1, 0.0, "afe")
        with pytest.raises(ValueError):
            LValueRecord(5, 1, -1e-6, "afe")
