# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: symbol sums, square-free sieve, fixed-prime lookups.

Same contracts as quadlf.kernels.pure; both backends consume the tables built
by quadlf.kernels.tables and must return identical integer results.
"""

import numpy as np

NAME = "compiled"


def prime_sums_degree(block, tab, int q):
    """(sum chi_D(P), count chi_D(P)==0) over the primes of one degree."""
    cdef const unsigned char[:, ::1] D = np.ascontiguousarray(block, dtype=np.uint8)
    cdef const signed char[:, :, ::1] red = np.ascontiguousarray(tab.redmat)
    cdef const signed char[:, ::1] chim = np.ascontiguousarray(tab.chimat)
    cdef Py_ssize_t m = D.shape[0]
    cdef Py_ssize_t L = D.shape[1]
    cdef Py_ssize_t n_p = red.shape[0]
    cdef Py_ssize_t d = red.shape[2]
    s_arr = np.zeros(m, dtype=np.int64)
    z_arr = np.zeros(m, dtype=np.int64)
    cdef long long[::1] s = s_arr
    cdef long long[::1] z = z_arr
    cdef Py_ssize_t i, p, j, k
    cdef long long acc, idx, qp
    cdef int v
    with nogil:
        for i in range(m):
            for p in range(n_p):
                idx = 0
                qp = 1
                for j in range(d):
                    acc = 0
                    for k in range(L):
                        acc += D[i, k] * red[p, k, j]
                    idx += (acc % q) * qp
                    qp *= q
                v = chim[p, idx]
                s[i] += v
                if v == 0:
                    z[i] += 1
    return s_arr, z_arr


def nonsquarefree_degree(block, tab, int q):
    """True where some P**2 with deg(P) equal to this degree divides D."""
    cdef const unsigned char[:, ::1] D = np.ascontiguousarray(block, dtype=np.uint8)
    cdef const signed char[:, :, ::1] sq = np.ascontiguousarray(tab.sqmat)
    cdef Py_ssize_t m = D.shape[0]
    cdef Py_ssize_t L = D.shape[1]
    cdef Py_ssize_t n_p = sq.shape[0]
    cdef Py_ssize_t d2 = sq.shape[2]
    out = np.zeros(m, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t i, p, j, k
    cdef long long acc
    cdef int allz
    with nogil:
        for i in range(m):
            for p in range(n_p):
                allz = 1
                for j in range(d2):
                    acc = 0
                    for k in range(L):
                        acc += D[i, k] * sq[p, k, j]
                    if acc % q != 0:
                        allz = 0
                        break
                if allz:
                    o[i] = 1
                    break
    return out.view(bool)


def chi_lookup(block, redmat, chimat, int q):
    """chi_D(P) for one fixed prime; int8 values in {-1, 0, 1}."""
    cdef const unsigned char[:, ::1] D = np.ascontiguousarray(block, dtype=np.uint8)
    cdef const signed char[:, ::1] red = np.ascontiguousarray(redmat)
    cdef const signed char[::1] chim = np.ascontiguousarray(chimat)
    cdef Py_ssize_t m = D.shape[0]
    cdef Py_ssize_t L = D.shape[1]
    cdef Py_ssize_t d = red.shape[1]
    out = np.zeros(m, dtype=np.int8)
    cdef signed char[::1] o = out
    cdef Py_ssize_t i, j, k
    cdef long long acc, idx, qp
    with nogil:
        for i in range(m):
            idx = 0
            qp = 1
            for j in range(d):
                acc = 0
                for k in range(L):
                    acc += D[i, k] * red[k, j]
                idx += (acc % q) * qp
                qp *= q
            o[i] = chim[idx]
    return out
