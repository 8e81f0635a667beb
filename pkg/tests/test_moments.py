import math
import warnings

import numpy as np
import pytest

from nvlab.arith import euler_phi
from nvlab.cache import LValueCache
from nvlab.characters import CharacterSet, epsilon_chi
from nvlab.lvalue import lvalue_direct
from nvlab.mollifier import MollifierSpec, PolySpec, m_is, m_mv
from nvlab.moments import (
    ModulusSet,
    analyze_window,
    build_modulus_set,
    census,
    cs_lower_bound,
    evaluate,
    predict_s1,
    predict_s2,
    s1_moment,
    s2_moment,
    weighted_mass,
)
from nvlab.weights import WeightConfig, phi_weight

X = PolySpec.linear()


def spec(theta=0.15, Q=100.0, P1=X, P2=X):
    return MollifierSpec(theta, theta, P1, P2, Q)


@pytest.fixture(scope="module")
def window100():
    cfg = WeightConfig(Q=100.0)
    ms = build_modulus_set(cfg)
    sp = spec(0.2)
    return ms, sp, analyze_window(ms, sp)


class TestModulusSet:
    def test_full_window(self):
        ms = build_modulus_set(WeightConfig(Q=100.0))
        assert ms.moduli == tuple(range(51, 150))

    def test_progression(self):
        ms = build_modulus_set(WeightConfig(Q=100.0, a=2, D=3))
        assert ms.moduli == tuple(q for q in range(51, 150) if q % 3 == 2)

    def test_narrow_tent(self):
        ms = build_modulus_set(WeightConfig(Q=100.0, eta1=0.5))
        assert ms.moduli == tuple(range(91, 110))

    def test_weights(self):
        cfg = WeightConfig(Q=100.0, eta1=0.2)
        ms = build_modulus_set(cfg)
        for q, w in ms:
            assert w == pytest.approx(phi_weight(cfg, q / 100) * q / euler_phi(q), rel=1e-12, abs=1e-300)
        assert list(ms.moduli) == sorted(ms.moduli)

    def test_empty(self):
        ms = build_modulus_set(WeightConfig(Q=100.0, eta1=1.0, a=1, D=2))
        assert len(ms) == 0


class TestMoments:
    def test_empty_set(self):
        cfg = WeightConfig(Q=100.0)
        ms = ModulusSet(cfg, (), ())
        rep = evaluate(ms, spec())
        assert rep.s1 == 0 and rep.s2 == 0 and rep.pred_s1 == 0 and rep.pred_s2 == 0
        assert "empty" in rep.flags
        assert predict_s1(ms, spec()) == 0 and predict_s2(ms, spec()) == 0

    def test_single_modulus_by_hand(self):
        ms = ModulusSet(WeightConfig(Q=100.0), (5,), (0.75,))
        sp = spec(0.3)
        chi = next(c for c in CharacterSet(5) if c.is_even and c.is_primitive)
        lm = lvalue_direct(chi) * (m_is(chi, sp) + m_mv(chi, sp))
        assert s1_moment(ms, sp) == pytest.approx(0.75 * lm, abs=1e-13)
        assert s2_moment(ms, sp) == pytest.approx(0.75 * abs(lm) ** 2, abs=1e-13)

    def test_short_mollifier_reduces_to_root_numbers(self):
        sp = MollifierSpec(0.1, 0.1, X, X, 100.0)  # y = 100^0.1 < 2
        ms = build_modulus_set(WeightConfig(Q=100.0, eta1=0.4))
        want = 0j
        for q, w in ms:
            for chi in CharacterSet(q):
                if chi.is_even and chi.is_primitive:
                    want += w * lvalue_direct(chi) * (1 + epsilon_chi(chi.conj()))
        assert s1_moment(ms, sp) == pytest.approx(want, rel=1e-12)

    def test_predictions(self, window100):
        ms, sp, data = window100
        mass_loop = 0.0
        for q, w in ms:
            n_plus = sum(1 for c in CharacterSet(q) if c.is_even and c.is_primitive)
            mass_loop += w * n_plus
        assert weighted_mass(ms) == pytest.approx(mass_loop, rel=1e-13)
        assert predict_s1(ms, sp) == pytest.approx(2 * mass_loop, rel=1e-13)
        sp4 = spec(0.25)
        assert predict_s2(ms, sp4) == pytest.approx(12 * mass_loop, rel=1e-13)

    def test_cauchy_schwarz_both_ways(self, window100):
        ms, sp, data = window100
        rep = evaluate(ms, sp, data=data)
        cen = census(ms, data=data)
        assert rep.s2 >= 0
        assert rep.cs_bound <= cen.weighted_nonvanishing_even + 1e-9
        assert rep.s2 >= abs(rep.s1) ** 2 / rep.mass
        assert rep.census_count == pytest.approx(cen.weighted_nonvanishing_even)

    @pytest.mark.parametrize("coeffs", [("0", "2", "-1"), ("0", "0", "1"), ("0", "3", "-3", "1")])
    def test_cs_bound_any_polynomial(self, window100, coeffs):
        ms, _, _ = window100
        sp = MollifierSpec(0.12, 0.3, PolySpec(coeffs), X, 100.0)
        rep = evaluate(ms, sp)
        assert rep.cs_bound <= census(ms).weighted_nonvanishing_even + 1e-9

    def test_threads_bit_identical(self):
        ms = build_modulus_set(WeightConfig(Q=120.0))
        sp = spec(0.2, 120.0)
        reps = [evaluate(ms, sp, threads=t) for t in (1, 3, 8)]
        assert all(r.s1 == reps[0].s1 and r.s2 == reps[0].s2 for r in reps)
        assert all(r.rows == reps[0].rows for r in reps)

    def test_cache_round_trip(self, tmp_path):
        ms = build_modulus_set(WeightConfig(Q=60.0))
        sp = spec(0.2, 60.0)
        path = tmp_path / "lv.jsonl"
        cold = LValueCache(path, version="t")
        first = evaluate(ms, sp, cache=cold)
        cold.checkpoint()
        # moduli without primitive characters have nothing to store and count as hits
        no_primitive = sum(1 for q in ms.moduli if q % 4 == 2)
        assert cold.stores == len(ms) - no_primitive and cold.hits == no_primitive
        warm = LValueCache(path, version="t")
        second = evaluate(ms, sp, cache=warm)
        assert warm.hits == len(ms) and warm.stores == 0
        assert first.s1 == second.s1 and first.s2 == second.s2


class TestCSBound:
    def test_examples(self):
        assert cs_lower_bound(0j, 3.0) == 0
        assert cs_lower_bound(2 + 0j, 4.0) == 1

    def test_zero_s2_warns(self):
        with pytest.warns(RuntimeWarning):
            assert cs_lower_bound(1j, 0.0) == 0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            cs_lower_bound(1j, -1.0)


class TestCensus:
    def test_no_central_zeros_at_small_conductors(self, window100):
        ms, _, data = window100
        cen = census(ms, data=data)
        assert cen.proportion == 1.0
        assert cen.proportion_even == 1.0 and cen.proportion_odd == 1.0

    def test_huge_threshold(self, window100):
        ms, _, data = window100
        assert census(ms, tau_nv=1e6, data=data).weighted_nonvanishing == 0

    def test_monotone_in_threshold(self, window100):
        ms, _, data = window100
        counts = [census(ms, tau_nv=t, data=data).weighted_nonvanishing for t in (1e-8, 0.1, 0.5, 1, 2, 4)]
        assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_rows_and_totals(self, window100):
        ms, _, data = window100
        cen = census(ms, data=data)
        assert len(cen.rows) == 2 * len(ms)
        tot = math.fsum(r["weight"] * r["primitive_count"] for r in cen.rows)
        assert tot == pytest.approx(cen.weighted_total)

    def test_threshold_positive(self, window100):
        ms, _, data = window100
        with pytest.raises(ValueError):
            census(ms, tau_nv=0, data=data)
