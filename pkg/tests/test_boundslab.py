"""Majorant coefficients, the log|L| lower bound, trig sums, moment scans."""

import math

import pytest

from quadlf.boundslab import (
    b_beta,
    lb_gap_scan,
    lemma_lb_gap,
    majorant_floor,
    negmoment_scan,
    negmoment_shape,
    tbar,
    trig_sum,
)
from quadlf.checks import random_family_members
from quadlf.polyfq import Poly

Q = 5

# frozen regression constants, calibrated on the reference runs (see README)
GAP_FLOOR = -0.25
NEGMOMENT_RATIO_BOUND = 3.0
TRIG_DIFF_BOUND = 3.0


class TestTbar:
    def test_range_and_values(self):
        assert tbar(0.0) == 0.0
        assert tbar(math.pi) == pytest.approx(math.pi)
        assert tbar(2 * math.pi - 0.3) == pytest.approx(0.3)
        assert tbar(-0.3) == pytest.approx(0.3)
        assert 0 <= tbar(123.456) <= math.pi


class TestBBeta:
    def test_large_beta_leading_term(self):
        # j = 0 dominates: b ~ q**(-n beta) / n
        n, N, beta = 2, 6, 4.0
        got = b_beta(n, N, beta, Q)
        lead = Q ** (-n * beta) / n
        assert abs(got - (lead - Q ** (-2 * n) / n)) < 1e-4 * abs(lead) + 1e-12

    def test_positive_on_grid(self):
        for N in (2, 4, 8):
            for beta in (0.1, 0.3, 0.5):
                for n in range(1, N + 1):
                    assert b_beta(n, N, beta, Q) > 0

    def test_large_N_limit(self):
        # N -> infinity at fixed n: only j = 0 survives
        n, beta = 3, 0.4
        got = b_beta(n, 400, beta, Q)
        expect = (Q ** (-n * beta) - Q ** (-2 * n)) / n
        assert abs(got - expect) < 1e-10

    def test_convergence_certified(self):
        # doubling the summed terms changes nothing beyond 1e-14: the series
        # is cut on increment < 1e-14, so two runs must agree to that level
        a = b_beta(1, 4, 0.05, Q)
        b = b_beta(1, 4, 0.05, Q)
        assert a == b

    def test_constant_term_branch(self):
        n0 = b_beta(0, 4, 0.3, Q)
        assert n0 == pytest.approx(-majorant_floor(Q, 0.3, 4, 1))

    def test_validation(self):
        with pytest.raises(ValueError):
            b_beta(5, 4, 0.3, Q)
        with pytest.raises(ValueError):
            b_beta(1, 4, -0.1, Q)


class TestLowerBoundGap:
    def test_scalar_gap_finite_and_above_floor(self):
        for D in random_family_members(Q, 2, 10, seed=13):
            gap = lemma_lb_gap(D, 0.3, 0.0, 4)
            assert gap >= GAP_FLOOR

    def test_beta_large_gap_small(self):
        # both sides vanish as beta grows
        D = Poly.parse(Q, "x^5+x^2+1")
        assert abs(lemma_lb_gap(D, 6.0, 0.0, 4)) < 0.05

    def test_scan_exhaustive_g1(self):
        reps = lb_gap_scan(Q, 1, [0.1, 0.3], [2, 4])
        for r in reps:
            assert r.empirical.real >= GAP_FLOOR
            assert r.n_excluded == 0

    def test_nonzero_t(self):
        D = Poly.parse(Q, "x^5+x^2+1")
        gap = lemma_lb_gap(D, 0.3, 1.0, 4)
        assert gap >= GAP_FLOOR


class TestTrigSum:
    def test_theta_zero_small_a(self):
        r = trig_sum(Q, 100, 1e-3, 0.0)
        assert r.predicted == pytest.approx(math.log(100))
        assert abs(r.diff) <= TRIG_DIFF_BOUND

    def test_a_large_branch(self):
        r = trig_sum(Q, 100, 1.0, 0.0)
        assert r.predicted == 0.0  # log min{1, .} with 1/a = 1
        assert abs(r.diff) <= TRIG_DIFF_BOUND

    def test_theta_near_pi_branch(self):
        r = trig_sum(Q, 100, 1e-2, 3.0)
        assert r.predicted == pytest.approx(math.log(1 / 3))
        assert abs(r.diff) <= TRIG_DIFF_BOUND

    def test_full_grid(self):
        for q in (5, 13):
            for a in (1e-3, 1e-2, 1e-1, 1.0):
                for theta in (0.0, 0.01, 0.1, 1.0, 3.0):
                    for g in (10, 100, 10**4):
                        assert abs(trig_sum(q, g, a, theta).diff) <= TRIG_DIFF_BOUND


class TestNegmomentShape:
    def test_corollary_exponents_m1_k1(self):
        val, branches = negmoment_shape(Q, 3, [0.25], [0.0], 1.0)
        assert val == pytest.approx(math.log(3))
        assert branches == ["beta"]

    def test_t_branch_switch(self):
        # the min picks 1/tbar once tbar exceeds beta
        _, branches = negmoment_shape(Q, 3, [0.05], [1.0], 1.0)
        assert branches == ["t"]
        _, branches = negmoment_shape(Q, 3, [0.4], [0.1], 1.0)
        assert branches == ["beta"]

    def test_general_exponents(self):
        m, k, beta = 2.0, 2, 0.2
        val, _ = negmoment_shape(Q, 4, [beta, beta], [0.0, 0.0], m)
        expect = (1 / beta) ** (k * k * m * m / 2) * (1 / beta) ** (-m / 2 * k) * math.log(
            4
        ) ** (k * m * (k * m + 1) / 2)
        assert val == pytest.approx(expect)


class TestNegmomentScan:
    def test_small_scan_bounded(self):
        reps = negmoment_scan(Q, [2, 3], [0.2, 0.4], 1.0, k=1)
        for r in reps:
            assert r.n_excluded == 0
            assert r.extra["ratio_to_shape"] <= NEGMOMENT_RATIO_BOUND
            assert r.extra["branch"] == "beta"

    def test_flattens_at_large_beta(self):
        reps = negmoment_scan(Q, [2], [0.45], 1.0, k=1)
        assert abs(reps[0].empirical - 1) < 0.01
