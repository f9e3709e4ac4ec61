"""Symbol tables and batch kernels against the scalar definitions."""

import numpy as np
import pytest

from quadlf.chars import jacobi
from quadlf.kernels import HAVE_COMPILED, get_backend
from quadlf.kernels import pipeline as pl
from quadlf.kernels.tables import build_tables, single_prime_tables
from quadlf.polyfq import Poly, is_squarefree, prime_polys

Q = 5
BACKENDS = ["pure"] + (["compiled"] if HAVE_COMPILED else [])


class TestTables:
    def test_chi_table_matches_jacobi(self):
        for d in (1, 2, 3):
            tab = build_tables(Q, 6, 3, sq_max_d=2).degree_tables(d)
            for i, p in enumerate(prime_polys(Q, d)):
                for k in range(0, Q**d, 7):
                    digits = []
                    kk = k
                    for _ in range(d):
                        digits.append(kk % Q)
                        kk //= Q
                    assert tab.chimat[i, k] == jacobi(Poly(Q, digits), p)

    def test_reduction_rows(self):
        tab = build_tables(Q, 6, 2, sq_max_d=1).degree_tables(2)
        p = prime_polys(Q, 2)[3]
        i = 3
        for k in range(6):
            expect = Poly.one(Q).shift(k) % p
            got = [int(v) for v in tab.redmat[i, k]]
            want = list(expect.coeffs) + [0] * (2 - len(expect.coeffs))
            assert got == want

    def test_counts(self):
        t = build_tables(Q, 6, 3, sq_max_d=1)
        assert list(t.counts[1:4]) == [5, 10, 40]


@pytest.mark.parametrize("backend_name", BACKENDS)
class TestBatchKernels:
    def test_squarefree_mask_matches_scalar(self, backend_name):
        be = get_backend(backend_name)
        tables = build_tables(Q, 6, 1, sq_max_d=2)
        block = pl.monic_block(Q, 5, 0, 3125)
        mask = pl.squarefree_mask(tables, block, be)
        for i in range(0, 3125, 41):
            D = Poly(Q, block[i].tolist())
            assert mask[i] == is_squarefree(D)
        assert int(mask.sum()) == 2500

    def test_prime_sums_match_scalar(self, backend_name):
        be = get_backend(backend_name)
        tables = build_tables(Q, 6, 3, sq_max_d=2)
        block = pl.monic_block(Q, 5, 1000, 1100)
        for d in (1, 2, 3):
            s, z = be.prime_sums_degree(block, tables.degree_tables(d), Q)
            for i in range(0, 100, 13):
                D = Poly(Q, block[i].tolist())
                vals = [jacobi(D, p) for p in prime_polys(Q, d)]
                assert s[i] == sum(vals)
                assert z[i] == vals.count(0)

    def test_chi_lookup_matches_scalar(self, backend_name):
        be = get_backend(backend_name)
        p = prime_polys(Q, 2)[5]
        redmat, chimat = single_prime_tables(p, 6)
        block = pl.monic_block(Q, 5, 2000, 2100)
        vals = be.chi_lookup(block, redmat, chimat, Q)
        for i in range(0, 100, 11):
            D = Poly(Q, block[i].tolist())
            assert vals[i] == jacobi(D, p)


class TestPipeline:
    def test_monic_block_encoding(self):
        block = pl.monic_block(Q, 3, 7, 8)
        assert Poly(Q, block[0].tolist()) == Poly.parse(Q, "x^3+x+2")

    def test_zero_angles_small(self):
        D = Poly.parse(Q, "x^5+x^2+1")
        from quadlf.lfun import l_coefficients

        L = l_coefficients(D)
        theta, resid = pl.zero_angles(np.array([L.c], dtype=np.int64), Q, 2)
        assert resid[0] < 1e-8
        assert theta.shape == (1, 4)
        assert np.all(np.diff(theta[0]) >= 0)

    def test_horner_matches_polyval(self):
        c = np.array([[1, -1, 0, -5, 25]], dtype=np.int64)
        u = 0.3 + 0.1j
        got = pl.horner(c, u)[0]
        want = sum(c[0][n] * u**n for n in range(5))
        assert abs(got - want) < 1e-12

    def test_overflow_guard(self):
        s = np.zeros((1, 20), dtype=np.int64)
        z = np.zeros((1, 20), dtype=np.int64)
        counts = np.ones(20, dtype=np.int64)
        with pytest.raises(OverflowError):
            pl.l_coeffs_from_prime_data(Q, 16, s, z, counts, recursion_to=16)
