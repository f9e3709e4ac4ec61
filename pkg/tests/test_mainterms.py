"""Predicted main terms: reflection identities, oracles, cross-path equality."""

import math

import numpy as np
import pytest

from quadlf.mainterms import (
    DivergenceError,
    PoleError,
    TwistPoly,
    density_main,
    euler_a,
    euler_b,
    mu_prime_power,
    ratio_k1_closed,
    ratios_main,
    ratios_s_term,
    s_tilde,
    tau_general,
    tau_prime_power,
    twisted_main,
    zeta_q,
    zeta_q_recip,
    zeta_u,
)
from quadlf.polyfq import Poly, enumerate_monic, prime_count

Q = 5


def P(text: str) -> Poly:
    return Poly.parse(Q, text)


class TestZeta:
    def test_direct_value(self):
        assert zeta_q(Q, 2) == pytest.approx(1.25)

    def test_u_form(self):
        assert zeta_u(Q, 1 / Q**2) == pytest.approx(1.25)

    def test_reflection(self):
        a = 0.1
        lhs = zeta_q(Q, 1 - 2 * a)
        rhs = -(Q ** (-2 * a)) * zeta_q(Q, 1 + 2 * a)
        assert abs(lhs - rhs) < 1e-14

    def test_large_s(self):
        assert abs(zeta_q(Q, 60) - 1) < 1e-12

    def test_pole(self):
        with pytest.raises(PoleError):
            zeta_q(Q, 1)
        assert zeta_q_recip(Q, 1) == 0


class TestShiftedDivisor:
    def test_prime_power_basics(self):
        shifts = [0.1, -0.2]
        assert tau_prime_power(shifts, Q, 1, 0) == 1
        assert mu_prime_power(shifts, Q, 1, 0) == 1
        # k=1 geometric: tau(P^j) = q^{-d j gamma}
        for j in range(5):
            expect = Q ** (-2 * j * 0.1)
            assert tau_prime_power([0.1], Q, 2, j) == pytest.approx(expect)

    def test_k2_first_power(self):
        g1, g2 = 0.1, 0.25
        got = tau_prime_power([g1, g2], Q, 1, 1)
        assert got == pytest.approx(Q**-g1 + Q**-g2)

    def test_mu_vanishes_past_k(self):
        assert mu_prime_power([0.1, 0.2], Q, 1, 3) == 0

    def test_tau_counts_ordered_factorizations(self):
        shifts = [0.0, 0.0, 0.0]
        f = P("x") * P("x") * P("x+1")
        # tau_3 of P^2 * Q: (# weak compositions of 2 into 3) * 3 = 6 * 3
        assert tau_general(shifts, f).real == pytest.approx(18)

    def test_multiplicative_matches_brute(self):
        shifts = [0.13, -0.08, 0.22]
        for n in range(0, 5):
            for f in list(enumerate_monic(Q, n))[::11]:
                a = tau_general(shifts, f, "multiplicative")
                b = tau_general(shifts, f, "brute")
                assert abs(a - b) < 1e-12

    def test_unit(self):
        assert tau_general([0.4], Poly.one(Q)) == 1


class TestTwistPoly:
    def test_decomposition(self):
        tw = TwistPoly.from_poly(P("x^2") * P("x+1"))
        assert tw.h1 == P("x+1") and tw.h2 == P("x")
        assert tw.h1 * tw.h2 * tw.h2 == tw.h


class TestEulerA:
    def test_u_zero(self):
        val, _ = euler_a([0.1], Q, 0.0)
        assert val == pytest.approx(1.0)

    def test_reflection(self):
        for a in (0.05, 0.1, 0.2):
            v1, _ = euler_a([a], Q, Q**a)
            v2, _ = euler_a([-a], Q, Q**-a)
            assert abs(v1 - v2) < 1e-10

    def test_k1_simplified_product_form(self):
        # prod over P of (1 - u^{2 d} / (|P|^{1+2g} (|P|+1))), via log1p so the
        # deviations survive the pi_q(d) amplification
        gamma, u = 0.07, 0.9
        val, _ = euler_a([gamma], Q, u, 1e-12)
        log_direct = math.fsum(
            prime_count(Q, d)
            * math.log1p(-(u ** (2 * d)) / (Q ** (d * (1 + 2 * gamma)) * (Q**d + 1)))
            for d in range(1, 45)
        )
        assert val.real == pytest.approx(math.exp(log_direct), abs=1e-11)

    def test_divergent_region_rejected(self):
        with pytest.raises(DivergenceError):
            euler_a([-0.4], Q, float(Q))


class TestEulerB:
    def test_trivial_twist(self):
        assert euler_b([0.1], TwistPoly.from_poly(Poly.one(Q)), 1.0) == 1.0

    def test_reflection_k1(self):
        tw = TwistPoly.from_poly(P("x^3"))
        for a in (0.05, 0.15):
            b1 = euler_b([a], tw, Q**a)
            b2 = euler_b([-a], tw, Q**-a)
            assert abs(b1 - tw.h1.norm() ** (-2 * a) * b2) < 1e-12

    def test_reflection_k2(self):
        tw = TwistPoly.from_poly(P("x") * P("x+1") * P("x+1"))
        g1, g2 = 0.08, -0.05
        lhs = euler_b([g1, g2], tw, Q ** ((g1 + g2) / 2))
        rhs = tw.h1.norm() ** (-(g1 + g2)) * euler_b([-g2, -g1], tw, Q ** (-(g1 + g2) / 2))
        assert abs(lhs - rhs) < 1e-12


class TestTwistedMain:
    def test_k1_reduction_h_one(self):
        g = 3
        a = 0.12
        val, _ = twisted_main(Q, g, [a], Poly.one(Q))
        ap, _ = euler_a([a], Q, 1.0)
        am, _ = euler_a([-a], Q, 1.0)
        expect = ap * zeta_q(Q, 1 + 2 * a) + Q ** (-2 * g * a) * am * zeta_q(Q, 1 - 2 * a)
        assert abs(val - expect) < 1e-12

    def test_symmetric_in_shifts(self):
        tw = P("x+2")
        v1, _ = twisted_main(Q, 2, [0.1, -0.05], tw)
        v2, _ = twisted_main(Q, 2, [-0.05, 0.1], tw)
        assert abs(v1 - v2) < 1e-12

    def test_pole_on_confluent_shifts(self):
        with pytest.raises(PoleError):
            twisted_main(Q, 2, [0.1, -0.1], Poly.one(Q))

    def test_window_enforced(self):
        with pytest.raises(ValueError):
            twisted_main(Q, 2, [0.3], Poly.one(Q))


class TestRatios:
    def test_matches_closed_form_grid(self):
        worst = 0.0
        for a in (0.05, -0.05, 0.1, -0.1):
            for b in (0.1, 0.2, 0.3):
                v1, _ = ratios_main(Q, 3, [a], [b])
                v2, _ = ratio_k1_closed(Q, 3, a, b)
                worst = max(worst, abs(v1 - v2))
        assert worst < 1e-10

    def test_confluent_equal_sets_give_one(self):
        v, _ = ratios_main(Q, 3, [0.1], [0.1])
        assert abs(v - 1) < 1e-12
        v2, _ = ratio_k1_closed(Q, 3, 0.1, 0.1)
        assert abs(v2 - 1) < 1e-12

    def test_alpha_equals_beta_diagonal_regular(self):
        v, _ = ratio_k1_closed(Q, 3, 0.2, 0.2)
        assert np.isfinite(v.real) and np.isfinite(v.imag)

    def test_large_beta_is_moment_limit(self):
        v, _ = ratios_main(Q, 3, [0.1], [12.0])
        m, _ = twisted_main(Q, 3, [0.1], Poly.one(Q))
        assert abs(v - m) < 1e-7

    def test_truncation_monotonicity(self):
        # doubling the depth moves the value by less than the reported tail
        from quadlf import mainterms

        val, trunc = ratios_s_term([0.1], [0.3], Q, tol=1e-6)
        deep, _ = ratios_s_term([0.1], [0.3], Q, tol=1e-14)
        assert abs(val - deep) <= max(trunc.tail_estimate, 1e-14) * abs(deep) * 5

    def test_window_validation(self):
        with pytest.raises(ValueError):
            ratios_main(Q, 3, [0.3], [0.2])
        with pytest.raises(ValueError):
            ratios_main(Q, 3, [0.1], [-0.2])
        with pytest.raises(ValueError):
            ratios_main(Q, 3, [0.1, 0.05], [0.2])

    def test_k2_reflection_structure(self):
        # S-term with reflected pair equals permuted evaluation (symmetry)
        v1, _ = ratios_s_term([0.1, -0.04], [0.2, 0.3], Q)
        v2, _ = ratios_s_term([-0.04, 0.1], [0.3, 0.2], Q)
        assert abs(v1 - v2) < 1e-12


class TestSTilde:
    def test_h_one_is_a_times_zeta(self):
        val, _ = s_tilde([0.1], TwistPoly.from_poly(Poly.one(Q)), Q)
        a, _ = euler_a([0.1], Q, 1.0)
        assert abs(val - a * zeta_q(Q, 1.2)) < 1e-12


class TestDensityMain:
    def test_point_mass_at_zero(self):
        val, warn = density_main(Q, 3, [1.0], 0)
        assert val == 1.0 and not warn

    def test_degree_one_prime_term(self):
        g, N = 3, 2
        phihat = [0.0, 0.0, 1.0]  # only the n/g = 1/3 sample is nonzero
        val, _ = density_main(Q, g, phihat, N)
        # -phidot/g + (1/g) q^{-1} * q * 1/(q+1)
        expect = -1 / g + (1 / g) * (1 / Q) * (Q * 1 / (Q + 1))
        assert val == pytest.approx(expect)

    def test_support_warning(self):
        _, warn = density_main(Q, 1, [1.0, 0, 0, 0, 0], 4)
        assert warn

    def test_phihat_one_sample_only(self):
        # transform supported at 0 only: value is that sample
        val, _ = density_main(Q, 4, [0.7] + [0.0] * 8, 8)
        assert val == pytest.approx(0.7)
