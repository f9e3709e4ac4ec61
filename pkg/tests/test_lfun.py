"""L-polynomial computation: coefficient oracles, symmetry, zeros, identities."""

import cmath
import math

import numpy as np
import pytest

from quadlf.chars import jacobi
from quadlf.checks import random_family_members, random_trig_poly
from quadlf.lfun import (
    LPolynomial,
    TrigPoly,
    approx_fe_product,
    chi_on_primes,
    evaluate_shifted,
    explicit_formula_residual,
    l_coefficients,
    power_sums,
    prime_power_sums,
    verify_functional_equation,
    zeros,
)
from quadlf.polyfq import Poly, enumerate_monic, prime_polys, von_mangoldt

Q = 5


def P(text: str) -> Poly:
    return Poly.parse(Q, text)


D5 = P("x^5+x^2+1")  # square-free, g = 2


class TestValidation:
    def test_rejects_even_degree(self):
        with pytest.raises(ValueError):
            l_coefficients(P("x^4+x+1"))

    def test_rejects_non_squarefree(self):
        bad = P("x+1") * P("x+1") * P("x^3+x+1")
        with pytest.raises(ValueError):
            l_coefficients(bad)


class TestCoefficients:
    def test_c0_and_top(self):
        L = l_coefficients(D5)
        assert L.c[0] == 1
        assert L.c[4] == Q**2  # FE symmetry applied to c_0

    def test_recursion_matches_direct_oracle(self):
        # acceptance-scale slice; the full 100-member run lives in acceptance
        for g, count in ((1, 12), (2, 8)):
            for D in random_family_members(Q, g, count, seed=5):
                rec = l_coefficients(D, "recursion")
                direct = l_coefficients(D, "direct")
                full = l_coefficients(D, "recursion_full")
                assert rec.c == direct.c == full.c

    def test_prime_power_sums_match_enumeration(self):
        for D in random_family_members(Q, 2, 5, seed=6):
            b = prime_power_sums(D, 4)
            for m in range(1, 5):
                brute = sum(
                    von_mangoldt(f) * jacobi(D, f)
                    for f in enumerate_monic(Q, m)
                    if von_mangoldt(f)
                )
                assert b[m - 1] == brute

    def test_chi_on_primes_matches_jacobi(self):
        table = chi_on_primes(D5, 3)
        for d in (1, 2, 3):
            for p in prime_polys(Q, d):
                assert table[p] == jacobi(D5, p)

    def test_csv_round_trip(self):
        L = l_coefficients(D5)
        again = LPolynomial.from_csv_row(L.to_csv_row())
        assert again == L


class TestFunctionalEquation:
    def test_zero_residual(self):
        for D in random_family_members(Q, 3, 10, seed=7):
            assert verify_functional_equation(l_coefficients(D, "recursion_full")) == 0

    def test_detector_fires_on_perturbation(self):
        L = l_coefficients(D5)
        broken = LPolynomial(L.q, L.g, L.c[:-1] + (L.c[-1] + 1,), L.source)
        assert verify_functional_equation(broken) > 0


class TestEvaluation:
    def test_large_shift_limit(self):
        assert abs(evaluate_shifted(l_coefficients(D5), 50.0) - 1) < 1e-12

    def test_central_value_real(self):
        v = evaluate_shifted(l_coefficients(D5), 0.0)
        assert abs(v.imag) < 1e-12

    def test_power_sums_newton_extension(self):
        L = l_coefficients(D5)
        S = power_sums(L, 6)
        b = prime_power_sums(D5, 6)
        assert S == b  # both are sums of Lambda * chi over degree n


class TestTwoSumExpansion:
    def test_k1_central(self):
        L = l_coefficients(D5)
        lhs = evaluate_shifted(L, 0.0)
        rhs = approx_fe_product(D5, [0.0])
        assert abs(lhs - rhs) <= 1e-9 * abs(lhs)

    def test_k2_random_shifts(self):
        L = l_coefficients(D5)
        a1, a2 = 0.1, -0.07
        lhs = evaluate_shifted(L, a1) * evaluate_shifted(L, a2)
        rhs = approx_fe_product(D5, [a1, a2])
        assert abs(lhs - rhs) <= 1e-9 * abs(lhs)

    def test_large_shift_tends_to_one(self):
        assert abs(approx_fe_product(D5, [5.0]) - 1) < 1e-3


class TestZeros:
    def test_count_and_conjugation(self):
        zs = zeros(l_coefficients(D5))
        assert len(zs.thetas) == 4
        # closed under theta -> 1 - theta
        partner = sorted((1 - t) % 1.0 for t in zs.thetas)
        assert np.allclose(partner, sorted(zs.thetas), atol=1e-9)

    def test_on_circle(self):
        for D in random_family_members(Q, 3, 25, seed=8):
            assert zeros(l_coefficients(D)).radii_residual < 1e-6

    def test_first_symmetric_function(self):
        L = l_coefficients(D5)
        zs = zeros(L)
        total = sum(cmath.exp(-2j * cmath.pi * t) for t in zs.thetas)
        assert abs(total - (-L.c[1] / math.sqrt(Q))) < 1e-8

    def test_product_recovers_top_coefficient(self):
        L = l_coefficients(D5)
        zs = zeros(L)
        prod = 1.0 + 0j
        for t in zs.thetas:
            prod *= -math.sqrt(Q) * cmath.exp(-2j * cmath.pi * t)
        assert abs(prod - L.c[-1]) < 1e-6 * abs(L.c[-1])

    def test_modulus_on_circle_product_form(self):
        # |L(u)| on |u| = q^{-1/2} equals the product over zeros
        L = l_coefficients(D5)
        zs = zeros(L)
        phi = 0.23
        u = cmath.exp(2j * cmath.pi * phi) / math.sqrt(Q)
        direct = abs(sum(c * u**n for n, c in enumerate(L.c)))
        prod = 1.0
        for t in zs.thetas:
            prod *= abs(1 - cmath.exp(2j * cmath.pi * (phi - t)))
        assert abs(direct - prod) < 1e-8


class TestExplicitFormula:
    def test_constant_test_function(self):
        h = TrigPoly((1.0,))
        assert explicit_formula_residual(D5, h) < 1e-10

    def test_first_harmonic(self):
        h = TrigPoly((0.0, 1.0))
        assert explicit_formula_residual(D5, h) < 1e-10

    def test_random_polys(self):
        rng = np.random.Generator(np.random.PCG64(3))
        for D in random_family_members(Q, 3, 10, seed=9):
            for _ in range(3):
                h = random_trig_poly(rng, int(rng.integers(0, 7)))
                assert explicit_formula_residual(D, h) < 1e-8

    def test_trig_poly_evenness(self):
        h = TrigPoly((0.3, -0.2, 0.7))
        assert abs(h(0.2) - h(-0.2)) < 1e-14
        assert h.hhat(-2) == h.hhat(2) == 0.7
