"""Precomputed symbol tables shared by both kernel backends.

For each monic irreducible P of degree d we store

* ``redmat``: the reduction matrix whose k-th row is x**k mod P, so that the
  residue of any polynomial is a single matrix product of its coefficients;
* ``chimat``: the quadratic character of F_q[x]/(P) indexed by the base-q
  digit encoding of the residue (0 on the zero residue);
* ``sqmat``: the analogous reduction matrix mod P**2, used by the square-free
  sieve (a zero residue row means P**2 divides the input).

Character tables are filled by walking the powers of a generator of the unit
group; multiplication by a fixed element is linear, so the walk is a
matrix-doubling scheme rather than q**d scalar multiplications.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from ..polyfq import Poly, _int_factor, check_field, prime_count, prime_polys


@dataclass(frozen=True)
class DegreeTables:
    degree: int
    primes: np.ndarray  # (n_p, d+1) uint8 coefficient rows
    redmat: np.ndarray  # (n_p, poly_len, d) int8
    chimat: np.ndarray  # (n_p, q**d) int8
    sqmat: np.ndarray | None  # (n_p, poly_len, 2d) int8


@dataclass(frozen=True)
class SymbolTables:
    q: int
    poly_len: int  # number of coefficient columns of the inputs
    max_d: int  # symbol tables built for prime degrees 1..max_d
    sq_max_d: int  # square sieve built for prime degrees 1..sq_max_d
    counts: np.ndarray  # counts[d] = pi_q(d), index 0 unused
    by_degree: tuple[DegreeTables, ...]

    def degree_tables(self, d: int) -> DegreeTables:
        return self.by_degree[d - 1]


def _reduction_rows(mod_coeffs: tuple[int, ...], q: int, nrows: int) -> np.ndarray:
    """Rows x**k mod m for k < nrows; m monic with coefficient tuple given."""
    d = len(mod_coeffs) - 1
    rows = np.zeros((nrows, d), dtype=np.int64)
    cur = [0] * d
    cur[0] = 1
    for k in range(nrows):
        rows[k] = cur
        lead = cur[-1]
        cur = [0] + cur[:-1]
        if lead:
            for i in range(d):
                cur[i] = (cur[i] - lead * mod_coeffs[i]) % q
    return rows


def _mult_matrix(elem: list[int], mod_coeffs: tuple[int, ...], q: int) -> np.ndarray:
    """Matrix of multiplication by elem in F_q[x]/(m): row i is x**i * elem."""
    d = len(mod_coeffs) - 1
    out = np.zeros((d, d), dtype=np.int64)
    cur = list(elem)
    for i in range(d):
        out[i] = cur
        lead = cur[-1]
        cur = [0] + cur[:-1]
        if lead:
            for j in range(d):
                cur[j] = (cur[j] - lead * mod_coeffs[j]) % q
    return out


def _find_generator(P: Poly) -> Poly:
    """Smallest-index generator of (F_q[x]/P)^*, deterministic."""
    q = P.q
    d = P.degree()
    order = q**d - 1
    prime_divs = _int_factor(order)
    for k in range(1, q**d):
        digits = []
        kk = k
        for _ in range(d):
            digits.append(kk % q)
            kk //= q
        g = Poly(q, digits)
        if all(not g.powmod(order // p, P).is_one() for p in prime_divs):
            return g
    raise ArithmeticError("no generator found")  # unreachable for a prime P


def _chi_table(P: Poly) -> np.ndarray:
    """Quadratic character of F_q[x]/(P), indexed by residue digits."""
    q = P.q
    d = P.degree()
    order = q**d - 1
    gen = _find_generator(P)
    gcoef = list(gen.coeffs) + [0] * (d - len(gen.coeffs))
    mod_coeffs = P.coeffs
    mult = _mult_matrix(gcoef, mod_coeffs, q)
    rows = np.zeros((1, d), dtype=np.int64)
    rows[0, 0] = 1  # gen**0
    while rows.shape[0] < order:
        rows = np.concatenate([rows, (rows @ mult) % q], axis=0)
        mult = (mult @ mult) % q
    rows = rows[:order]
    qpow = q ** np.arange(d, dtype=np.int64)
    idx = rows @ qpow
    table = np.zeros(q**d, dtype=np.int8)
    table[idx[0::2]] = 1
    table[idx[1::2]] = -1
    if int(np.count_nonzero(table)) != order:
        raise ArithmeticError(f"character table incomplete for {P!r}")
    return table


_CACHE: dict[tuple[int, int, int, int], SymbolTables] = {}


def build_tables(q: int, poly_len: int, max_d: int, sq_max_d: int = 0) -> SymbolTables:
    """Build (or fetch cached) symbol tables for prime degrees 1..max_d."""
    check_field(q)
    key = (q, poly_len, max_d, sq_max_d)
    hit = _CACHE.get(key)
    if hit is not None:
        return hit
    counts = np.zeros(max(max_d, sq_max_d) + 1, dtype=np.int64)
    per_degree = []
    for d in range(1, max(max_d, sq_max_d) + 1):
        counts[d] = prime_count(q, d)
        primes = prime_polys(q, d)
        n_p = len(primes)
        pcoef = np.zeros((n_p, d + 1), dtype=np.uint8)
        redmat = np.zeros((n_p, poly_len, d), dtype=np.int8)
        chimat = np.zeros((n_p, q**d), dtype=np.int8)
        want_sq = d <= sq_max_d
        sqmat = np.zeros((n_p, poly_len, 2 * d), dtype=np.int8) if want_sq else None
        for i, p in enumerate(primes):
            pcoef[i] = p.coeffs
            if d <= max_d:
                redmat[i] = _reduction_rows(p.coeffs, q, poly_len)
                chimat[i] = _chi_table(p)
            if want_sq:
                sqmat[i] = _reduction_rows((p * p).coeffs, q, poly_len)
        per_degree.append(DegreeTables(d, pcoef, redmat, chimat, sqmat))
    tables = SymbolTables(q, poly_len, max_d, sq_max_d, counts, tuple(per_degree))
    _CACHE[key] = tables
    return tables


@functools.lru_cache(maxsize=4096)
def single_prime_tables(P: Poly, poly_len: int) -> tuple[np.ndarray, np.ndarray]:
    """(redmat, chimat) for one prime, for fixed-twist character lookups."""
    return (
        _reduction_rows(P.coeffs, P.q, poly_len).astype(np.int8),
        _chi_table(P),
    )
