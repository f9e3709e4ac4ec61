"""Numpy fallback kernels.

The per-discriminant hot loop is expressed as one large matrix product per
prime degree: residues of every D mod every P come from a single GEMM on the
coefficient block, then character values are gathered from the tables. All
products stay below 2**24, so float32 BLAS is exact and much faster than
int64 loops; a float64 path guards larger q.
"""

from __future__ import annotations

import numpy as np

from .tables import DegreeTables

NAME = "pure"


def _gemm_dtype(q: int, poly_len: int):
    # exact float bound: entries < q, inner length poly_len
    return np.float32 if (q - 1) * (q - 1) * poly_len < (1 << 24) else np.float64


def prime_sums_degree(
    block: np.ndarray, tab: DegreeTables, q: int
) -> tuple[np.ndarray, np.ndarray]:
    """Sum of chi_D(P) and count of chi_D(P) = 0 over primes of one degree.

    block: (m, poly_len) uint8 coefficient rows of the D's.
    Returns (s, z) int64 vectors of length m.
    """
    n_p, poly_len, d = tab.redmat.shape
    dt = _gemm_dtype(q, poly_len)
    flat = tab.redmat.astype(dt).transpose(1, 0, 2).reshape(poly_len, n_p * d)
    res = block.astype(dt) @ flat  # (m, n_p*d), exact
    res = np.asarray(res, dtype=np.int64).reshape(-1, n_p, d) % q
    qpow = q ** np.arange(d, dtype=np.int64)
    idx = res @ qpow  # (m, n_p)
    vals = tab.chimat[np.arange(n_p)[None, :], idx]  # (m, n_p) int8
    s = vals.astype(np.int64).sum(axis=1)
    z = (vals == 0).sum(axis=1, dtype=np.int64)
    return s, z


def nonsquarefree_degree(block: np.ndarray, tab: DegreeTables, q: int) -> np.ndarray:
    """Boolean mask: some P**2 of this degree divides D (zero residue row)."""
    sqmat = tab.sqmat
    n_p, poly_len, d2 = sqmat.shape
    dt = _gemm_dtype(q, poly_len)
    flat = sqmat.astype(dt).transpose(1, 0, 2).reshape(poly_len, n_p * d2)
    res = block.astype(dt) @ flat
    res = np.asarray(res, dtype=np.int64).reshape(-1, n_p, d2) % q
    return (~res.any(axis=2)).any(axis=1)


def chi_lookup(
    block: np.ndarray, redmat: np.ndarray, chimat: np.ndarray, q: int
) -> np.ndarray:
    """chi_D(P) for a single fixed prime; returns int8 values in {-1, 0, 1}."""
    poly_len, d = redmat.shape
    dt = _gemm_dtype(q, poly_len)
    res = np.asarray(block.astype(dt) @ redmat.astype(dt), dtype=np.int64) % q
    idx = res @ (q ** np.arange(d, dtype=np.int64))
    return chimat[idx]
