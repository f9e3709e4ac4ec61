"""Backend-agnostic batch pipeline for per-discriminant computations.

Everything here operates on blocks of monic degree-(2g+1) coefficient rows
(uint8) and exact int64 coefficient arrays; the only backend-dependent steps
are the per-degree symbol sums and the square-free sieve.
"""

from __future__ import annotations

import math

import numpy as np

from ..polyfq import Poly, factor
from .tables import SymbolTables, single_prime_tables


def monic_block(q: int, n: int, lo: int, hi: int) -> np.ndarray:
    """Coefficient rows of the monic degree-n polynomials with indices lo..hi-1."""
    k = np.arange(lo, hi, dtype=np.int64)
    out = np.empty((hi - lo, n + 1), dtype=np.uint8)
    for j in range(n):
        out[:, j] = (k // q**j) % q
    out[:, n] = 1
    return out


def block_from_polys(polys, n: int) -> np.ndarray:
    out = np.zeros((len(polys), n + 1), dtype=np.uint8)
    for i, p in enumerate(polys):
        out[i, : len(p.coeffs)] = p.coeffs
    return out


def squarefree_mask(tables: SymbolTables, block: np.ndarray, backend) -> np.ndarray:
    """True where D is square-free (no P**2 divides D, deg P <= sq_max_d)."""
    nonsq = np.zeros(block.shape[0], dtype=bool)
    for d in range(1, tables.sq_max_d + 1):
        nonsq |= backend.nonsquarefree_degree(block, tables.degree_tables(d), tables.q)
    return ~nonsq


def prime_data(
    tables: SymbolTables, block: np.ndarray, dmax: int, backend
) -> tuple[np.ndarray, np.ndarray]:
    """Per-degree symbol sums: s[:, d] = sum chi_D(P), z[:, d] = #{chi_D(P)=0}."""
    m = block.shape[0]
    s = np.zeros((m, dmax + 1), dtype=np.int64)
    z = np.zeros((m, dmax + 1), dtype=np.int64)
    for d in range(1, dmax + 1):
        s[:, d], z[:, d] = backend.prime_sums_degree(
            block, tables.degree_tables(d), tables.q
        )
    return s, z


def _check_coeff_budget(q: int, g: int, recursion_to: int) -> None:
    bound_b = 2 * g * q**recursion_to
    bound_c = math.comb(2 * g, g) * q**g
    if bound_b * bound_c * (recursion_to + 1) >= 1 << 62:
        raise OverflowError(
            "batch coefficient recursion would exceed int64; "
            "use the scalar path (quadlf.lfun.l_coefficients) for this size"
        )


def l_coeffs_from_prime_data(
    q: int,
    g: int,
    s: np.ndarray,
    z: np.ndarray,
    counts: np.ndarray,
    recursion_to: int | None = None,
) -> np.ndarray:
    """L-polynomial coefficients c_0..c_{2g} for a block of discriminants.

    The Newton recursion n*c_n = sum b_m c_{n-m} is run up to `recursion_to`
    (default g) and the remaining coefficients are filled by the functional-
    equation symmetry c_n = q**(n-g) * c_{2g-n}. With recursion_to = 2g the
    symmetry is never used, which makes the functional-equation check
    non-vacuous.
    """
    top = g if recursion_to is None else recursion_to
    if not g <= top <= 2 * g:
        raise ValueError("recursion_to must lie in [g, 2g]")
    _check_coeff_budget(q, g, top)
    m = s.shape[0]
    b = np.zeros((m, top + 1), dtype=np.int64)
    for mm in range(1, top + 1):
        acc = np.zeros(m, dtype=np.int64)
        for d in range(1, mm + 1):
            if mm % d:
                continue
            if (mm // d) % 2 == 1:
                acc += d * s[:, d]
            else:
                acc += d * (int(counts[d]) - z[:, d])
        b[:, mm] = acc
    c = np.zeros((m, 2 * g + 1), dtype=np.int64)
    c[:, 0] = 1
    for n in range(1, top + 1):
        acc = np.zeros(m, dtype=np.int64)
        for mm in range(1, n + 1):
            acc += b[:, mm] * c[:, n - mm]
        if np.any(acc % n):
            raise ArithmeticError("coefficient recursion produced non-integers")
        c[:, n] = acc // n
    for n in range(top + 1, 2 * g + 1):
        c[:, n] = q ** (n - g) * c[:, 2 * g - n]
    return c


def power_sums_from_coeffs(c: np.ndarray, g: int, nmax: int) -> np.ndarray:
    """Prime power sums S_n = sum over M_n of Lambda(f) chi_D(f), n <= nmax.

    Newton's identity S_n = n c_n - sum_{m<n} S_m c_{n-m} extends past 2g
    with c_k = 0, so any nmax is reachable from the 2g+1 coefficients.
    Column 0 is unused.
    """
    m = c.shape[0]
    S = np.zeros((m, nmax + 1), dtype=np.int64)
    for n in range(1, nmax + 1):
        acc = n * c[:, n] if n <= 2 * g else np.zeros(m, dtype=np.int64)
        for mm in range(1, n):
            if n - mm <= 2 * g:
                acc = acc - S[:, mm] * c[:, n - mm]
        S[:, n] = acc
    return S


def horner(c: np.ndarray, u: complex) -> np.ndarray:
    """Evaluate the coefficient rows at a common point u."""
    acc = np.zeros(c.shape[0], dtype=np.complex128)
    for j in range(c.shape[1] - 1, -1, -1):
        acc *= u
        acc += c[:, j]
    return acc


def chi_fixed_twist(block: np.ndarray, h: Poly, backend) -> np.ndarray:
    """chi_D(h) for a fixed monic twist h, multiplicative over its primes."""
    if not h.is_monic():
        raise ValueError("monic twist required")
    m = block.shape[0]
    out = np.ones(m, dtype=np.int8)
    poly_len = block.shape[1]
    for p, e in factor(h).factors:
        redmat, chimat = single_prime_tables(p, poly_len)
        v = backend.chi_lookup(block, redmat, chimat, h.q)
        out *= v if e % 2 else (v != 0).astype(np.int8)
    return out


def zero_angles(c: np.ndarray, q: int, g: int) -> tuple[np.ndarray, np.ndarray]:
    """Zero angles theta in [0,1) and radii residuals for a coefficient block.

    Companion-matrix eigenvalues followed by two Newton polishing steps on the
    exact coefficients; the residual records max | |u| sqrt(q) - 1 | before
    any projection.
    """
    m, w = c.shape
    n = 2 * g
    assert w == n + 1
    comp = np.zeros((m, n, n), dtype=np.float64)
    comp[:, np.arange(1, n), np.arange(n - 1)] = 1.0
    comp[:, :, -1] = -c[:, :-1] / c[:, -1:]
    u = np.linalg.eigvals(comp)
    cc = c.astype(np.complex128)
    dcoef = cc[:, 1:] * np.arange(1, n + 1)
    for _ in range(2):
        pu = np.zeros_like(u)
        for j in range(n, -1, -1):
            pu = pu * u + cc[:, j : j + 1]
        dpu = np.zeros_like(u)
        for j in range(n - 1, -1, -1):
            dpu = dpu * u + dcoef[:, j : j + 1]
        step = np.where(np.abs(dpu) > 1e-30, pu / np.where(dpu == 0, 1, dpu), 0)
        u = u - step
    resid = np.max(np.abs(np.abs(u) * math.sqrt(q) - 1.0), axis=1)
    theta = np.sort((np.angle(u) / (2 * np.pi)) % 1.0, axis=1)
    return theta, resid
