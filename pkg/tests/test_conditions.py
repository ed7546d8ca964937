import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pscs import conditions as cond
from pscs.errors import (
    BadDecomposition,
    DeltaKTooLarge,
    EmptySupportUnion,
    MissingConstant,
    NegativeConstant,
)
from pscs.harness import RicCache, gen_matrix


class TestCandes:
    @pytest.mark.parametrize("delta,holds", [(0.0, True), (1.0, False), (0.99, True)])
    def test_l0(self, delta, holds):
        v = cond.check_candes_l0(delta)
        assert v.holds is holds and v.threshold == 1.0 and v.lhs == delta

    def test_l0_negative(self):
        with pytest.raises(NegativeConstant):
            cond.check_candes_l0(-0.1)

    def test_l1(self):
        assert cond.check_candes_l1(0, 0, 0).holds
        v = cond.check_candes_l1(0.3, 0.3, 0.4)
        assert v.lhs == 1.0 and not v.holds
        v = cond.check_candes_l1(0.2, 0.1, 0.1)
        assert v.holds and v.lhs == pytest.approx(0.4, abs=1e-15)


class TestCoherence:
    def test_example_matrix_value(self):
        v = cond.check_coherence_l1(1 / np.sqrt(2), 1)
        assert v.threshold == pytest.approx(0.5 * (1 + np.sqrt(2)), abs=1e-12)
        assert v.threshold == pytest.approx(1.2071, abs=1e-4)
        assert v.holds

    def test_boundary_and_plain(self):
        assert not cond.check_coherence_l1(1.0, 1).holds
        v = cond.check_coherence_l1(0.1, 5)
        assert v.threshold == pytest.approx(5.5) and v.holds

    def test_zero_coherence(self):
        v = cond.check_coherence_l1(0.0, 100)
        assert v.holds and v.threshold == math.inf


class TestVaswani:
    @pytest.mark.parametrize("delta,holds", [(0.0, True), (1.0, False), (0.5, True)])
    def test_l0(self, delta, holds):
        assert cond.check_vaswani_l0(delta).holds is holds

    def test_rho(self):
        assert cond.rho_k(0, 0, 0, 0.3, 0.5) == 0.0
        assert cond.rho_k(0.1, 0, 0, 0.0, 0.5) == pytest.approx(0.2)
        r = cond.rho_k(0, 0, 0, 0.0, 1.0)
        assert isinstance(r, cond.Degenerate)
        with pytest.raises(DeltaKTooLarge):
            cond.rho_k(0, 0, 0, 1.0, 0.0)

    def zeros(self):
        return {key: 0.0 for key in cond.VASWANI1_KEYS}

    def test_l1_zero(self):
        assert cond.check_vaswani_l1(self.zeros()).holds

    def test_l1_second_sum(self):
        c = self.zeros()
        c.update(delta_2u=0.5, delta_k=0.5, theta_k_2u=0.1)
        v = cond.check_vaswani_l1(c)
        assert not v.holds
        assert v.inputs["second_lhs"] == pytest.approx(1.01)

    def test_l1_missing(self):
        c = self.zeros()
        del c["theta_u_u"]
        with pytest.raises(MissingConstant):
            cond.check_vaswani_l1(c)

    def test_l1_degenerate(self):
        c = self.zeros()
        c["delta_u"] = 1.0
        v = cond.check_vaswani_l1(c)
        assert v.degenerate and not v.holds

    @staticmethod
    def hand_vaswani(c):
        # formulas written out directly from the theorem statement
        dk = c["delta_k"]

        def rho(th_ts, th_tk, th_sk, ds):
            return (th_ts + th_tk * th_sk / (1 - dk)) / (1 - ds - th_sk**2 / (1 - dk))

        r1 = rho(c["theta_u_2u"], c["theta_u_k"], c["theta_k_2u"], c["delta_2u"])
        r2 = rho(c["theta_u_u"], c["theta_u_k"], c["theta_u_k"], c["delta_u"])
        ok = (
            c["delta_k_plus_u"] < 1
            and c["delta_2u"] + c["delta_k"] + c["theta_k_2u"] ** 2 < 1
            and r1 + r2 < 1
        )
        return r1 + r2, ok

    @pytest.mark.parametrize("m", [8, 60, 200])
    def test_l1_from_matrix(self, m):
        A = gen_matrix(m, 16 if m == 8 else 10, 4)
        cache = RicCache(A)
        k, u = 2, 1
        c = {
            "delta_k_plus_u": cache.delta(k + u),
            "delta_2u": cache.delta(2 * u),
            "delta_k": cache.delta(k),
            "delta_u": cache.delta(u),
            "theta_k_2u": cache.theta(k, 2 * u),
            "theta_u_2u": cache.theta(u, 2 * u),
            "theta_u_k": cache.theta(u, k),
            "theta_u_u": cache.theta(u, u),
        }
        v = cond.check_vaswani_l1(c)
        if c["delta_k"] >= 1 or v.degenerate:
            assert not v.holds
            return
        lhs, ok = self.hand_vaswani(c)
        assert v.lhs == pytest.approx(lhs, rel=1e-12)
        assert v.holds is ok

    def test_corollary(self):
        assert cond.check_vaswani_corollary(0.1, 3, 1).holds
        v = cond.check_vaswani_corollary(0.1, 1, 2)
        assert not v.holds and v.reason == "u > k"
        assert not cond.check_vaswani_corollary(0.2, 3, 1).holds


class TestWeightedL0:
    def test_ceiling(self):
        assert cond.weighted_l0_order(4, 1, 3, 0.5) == 4 + 2 + 2
        v = cond.check_weighted_l0(0.3, 4, 1, 3, 0.5)
        assert v.inputs["order"] == 8 and v.order == 8 and v.holds

    def test_float_noise_in_ceiling(self):
        assert cond.ceil_weight(0.3, 10) == 3
        assert cond.ceil_weight(0.1, 3) == 1
        assert cond.ceil_weight(0.0, 7) == 0

    @pytest.mark.parametrize("t", range(6))
    def test_w0_is_vaswani_order(self, t):
        assert cond.weighted_l0_order(5, 2, t, 0.0) == 5 + 2 * 2

    @pytest.mark.parametrize("t,u", [(1, 0), (3, 2), (4, 4)])
    def test_w1_without_prior_errors_is_2s(self, t, u):
        k = t  # e = 0, T inside N
        assert cond.weighted_l0_order(k, u, t, 1.0) == 2 * (t + u)

    def test_bad_decomposition(self):
        with pytest.raises(BadDecomposition):
            cond.check_weighted_l0(0.1, 2, 1, 3, 0.5)


class TestWeightedL1:
    def test_w1_factor(self):
        v = cond.check_weighted_l1(0.1, 0.2, 0.3, 3, 2, 1.0)
        assert v.inputs["factor"] == 1.0
        assert v.lhs == 0.2 + 0.1 + 0.3

    def test_w0_balanced_factor(self):
        assert cond.weight_factor(4, 4, 0.0) == pytest.approx(1 / np.sqrt(2), abs=1e-15)

    def test_hand_value(self):
        v = cond.check_weighted_l1(0.2, 0.2, 0.2, 3, 1, 0.5)
        factor = math.sqrt((3 * 0.25 + 1) / 4)
        assert factor == pytest.approx(0.66144, abs=1e-5)
        assert v.lhs == pytest.approx(factor * 0.2 + 0.4, abs=1e-15)
        assert v.lhs == pytest.approx(0.53229, abs=1e-5)
        assert v.holds

    def test_empty_union(self):
        with pytest.raises(EmptySupportUnion):
            cond.check_weighted_l1(0.1, 0.1, 0.1, 0, 0, 0.5)

    @given(
        st.floats(0, 1), st.floats(0, 1), st.floats(0, 1),
        st.integers(0, 6), st.integers(0, 6), st.floats(0, 1), st.floats(0, 1),
    )
    def test_monotone_in_w(self, d, th, th2, k, u, w_a, w_b):
        if k + u == 0:
            return
        lo, hi = sorted((w_a, w_b))
        v_lo = cond.check_weighted_l1(d, th, th2, k, u, lo)
        v_hi = cond.check_weighted_l1(d, th, th2, k, u, hi)
        assert v_lo.lhs <= v_hi.lhs
        if v_hi.holds:
            assert v_lo.holds

    @pytest.mark.parametrize("seed", range(3))
    def test_l0_monotone_in_w_with_exact_delta(self, seed):
        cache = RicCache(gen_matrix(6, 10, seed))
        k, u, t = 3, 1, 3
        grid = np.linspace(0, 1, 11)
        verdicts = [
            cond.check_weighted_l0(cache.delta(cond.weighted_l0_order(k, u, t, w), clamp=True), k, u, t, w)
            for w in grid
        ]
        lhs = [v.lhs for v in verdicts]
        assert lhs == sorted(lhs)
        for i, v in enumerate(verdicts):
            if v.holds:
                assert all(x.holds for x in verdicts[:i])


class TestRicOnly:
    def test_threshold(self):
        v = cond.check_weighted_l1_ric_only(0.1, 2, 1)
        assert abs(v.threshold - 0.369) < 1e-3
        assert v.threshold == pytest.approx(np.sqrt(2) / (1 + 2 * np.sqrt(2)), abs=1e-12)

    def test_values(self):
        assert cond.check_weighted_l1_ric_only(0.36, 3, 3).holds
        assert not cond.check_weighted_l1_ric_only(0.37, 3, 3).holds
        v = cond.check_weighted_l1_ric_only(0.1, 1, 2)
        assert not v.holds and not v.degenerate and v.reason == "u > k"


def test_verdicts_are_pure():
    a = cond.check_weighted_l1(0.1, 0.2, 0.3, 2, 1, 0.4)
    b = cond.check_weighted_l1(0.1, 0.2, 0.3, 2, 1, 0.4)
    assert a == b
