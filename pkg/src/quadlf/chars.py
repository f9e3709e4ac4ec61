"""Quadratic residue and Jacobi symbols, the additive exponential, Gauss sums.

Symbol conventions (q = 1 mod 4 throughout, so reciprocity carries no sign):

* ``jacobi(f, Q)`` is the symbol (f/Q) with modulus Q: multiplicative over the
  prime factorization of Q, computed by a Euclidean reciprocity ladder.
* The family character is ``chi(D, f) = (D/f)``.
* Inside Gauss sums the argument runs over all residues mod f and the
  character applied to it is ``(u/f)`` (u in the numerator); for monic coprime
  operands the two orders agree by reciprocity.
"""

from __future__ import annotations

import cmath
import functools
import itertools
import math

import numpy as np

from .polyfq import Poly, check_field, enumerate_monic, factor, is_irreducible

__all__ = [
    "legendre",
    "residue_symbol",
    "jacobi",
    "jacobi_via_factorization",
    "chi",
    "inv_x_coeff",
    "e_of_ratio",
    "gauss_sum",
    "gauss_sum_closed",
    "gauss_sum_factored",
    "family_char_sum_sides",
    "monic_char_sum_sides",
]


@functools.lru_cache(maxsize=None)
def _legendre_table(q: int) -> tuple[int, ...]:
    check_field(q)
    squares = {(a * a) % q for a in range(1, q)}
    return tuple(0 if c == 0 else (1 if c in squares else -1) for c in range(q))


def legendre(c: int, q: int) -> int:
    """Quadratic character of F_q at the scalar c."""
    return _legendre_table(q)[c % q]


def residue_symbol(f: Poly, P: Poly) -> int:
    """(f/P) for P monic irreducible, by Euler's criterion (powmod oracle)."""
    if not (P.is_monic() and is_irreducible(P)):
        raise ValueError("modulus must be monic irreducible")
    r = f % P
    if r.is_zero():
        return 0
    val = r.powmod((P.norm() - 1) // 2, P)
    if val.is_one():
        return 1
    if val == Poly.constant(P.q, -1):
        return -1
    raise ArithmeticError(f"residue symbol not in {{0, +-1}}: {val!r}")


def jacobi(f: Poly, Q: Poly) -> int:
    """(f/Q) for monic Q, via the reciprocity ladder.

    Constant Q gives 1. The leading coefficient of each remainder contributes
    legendre(c)**deg(Q), and monic-vs-monic swaps are free since q = 1 mod 4.
    """
    f._check_same_field(Q)
    if Q.is_zero():
        raise ValueError("zero modulus")
    if not Q.is_monic():
        raise ValueError("modulus must be monic")
    q = f.q
    sign = 1
    a, b = f, Q
    while True:
        if b.is_one():
            return sign
        a = a % b
        if a.is_zero():
            return 0
        lead = a.leading()
        if lead != 1:
            if legendre(lead, q) == -1 and b.degree() % 2 == 1:
                sign = -sign
            a = a.monic()
        a, b = b, a


def jacobi_via_factorization(f: Poly, Q: Poly) -> int:
    """Definition path: product of residue symbols over the primes of Q."""
    if not Q.is_monic():
        raise ValueError("modulus must be monic")
    out = 1
    for p, e in factor(Q).factors:
        s = residue_symbol(f, p)
        if s == 0:
            return 0
        if e % 2 and s == -1:
            out = -out
    return out


def chi(D: Poly, f: Poly) -> int:
    """The family character chi_D(f) = (D/f)."""
    return jacobi(D, f)


# -- additive exponential ----------------------------------------------------


def inv_x_coeff(A: Poly, f: Poly) -> int:
    """Coefficient of 1/x in the Laurent expansion of A/f at infinity.

    For monic f and R = A mod f this is just the x**(deg f - 1) coefficient
    of R, an element of F_q.
    """
    if f.is_zero():
        raise ValueError("zero denominator")
    r = A % f.monic()
    n = f.degree()
    if r.degree() == n - 1:
        return r.coeffs[n - 1]
    return 0


def e_of_ratio(A: Poly, f: Poly) -> complex:
    """e(A/f) = exp(2 pi i a1 / q), a1 the 1/x Laurent coefficient of A/f."""
    return cmath.exp(2j * cmath.pi * inv_x_coeff(A, f) / A.q)


@functools.lru_cache(maxsize=None)
def _unit_roots(q: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(q) / q)


@functools.lru_cache(maxsize=None)
def _residue_digits(q: int, n: int) -> np.ndarray:
    """(q**n, n) digit matrix: row k holds the base-q digits of k."""
    k = np.arange(q**n, dtype=np.int64)
    cols = [(k // q**j) % q for j in range(n)]
    return np.stack(cols, axis=1) if n else np.zeros((1, 0), dtype=np.int64)


@functools.lru_cache(maxsize=None)
def _chi_vector(f: Poly) -> np.ndarray:
    """(u/f) for every residue u mod f, indexed by digit encoding."""
    q = f.q
    n = f.degree()
    out = np.empty(q**n, dtype=np.int8)
    for k in range(q**n):
        digits = []
        kk = k
        for _ in range(n):
            digits.append(kk % q)
            kk //= q
        out[k] = jacobi(Poly(q, digits), f)
    return out


def _exp_weights(V: Poly, f: Poly) -> np.ndarray:
    """w_k with a1(u*V/f) = sum_k u_k w_k; linear in the residue u."""
    q = f.q
    n = f.degree()
    return np.array(
        [inv_x_coeff(V.shift(k), f) for k in range(n)], dtype=np.int64
    )


def gauss_sum(V: Poly, f: Poly) -> complex:
    """G(V, chi_f) = sum over residues u mod f of (u/f) e(uV/f), directly."""
    V._check_same_field(f)
    if not f.is_monic() or f.is_constant():
        raise ValueError("modulus must be monic nonconstant")
    q = f.q
    n = f.degree()
    digits = _residue_digits(q, n)
    idx = (digits @ _exp_weights(V, f)) % q
    vals = _chi_vector(f).astype(np.complex128) * _unit_roots(q)[idx]
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


def gauss_sum_closed(V: Poly, P: Poly, j: int) -> complex:
    """G(V, chi_{P**j}) in closed form on a prime-power modulus.

    With V = V1 * P**a, P not dividing V1 (a = infinity when V = 0):
    0 for j <= a odd; phi(P**j) for j <= a even; -|P|**(j-1) for j = a+1
    even; (V1/P) |P|**(j-1/2) for j = a+1 odd; 0 for j >= a+2.
    """
    if j < 1:
        raise ValueError("exponent must be >= 1")
    if not (P.is_monic() and is_irreducible(P)):
        raise ValueError("P must be monic irreducible")
    np_ = P.norm()
    if V.is_zero():
        a: float = math.inf
        V1 = V
    else:
        a = 0
        V1 = V
        while (V1 % P).is_zero():
            V1 = V1 // P
            a += 1
    if j <= a:
        return complex(np_**j - np_ ** (j - 1)) if j % 2 == 0 else 0.0
    if j == a + 1:
        if j % 2 == 0:
            return complex(-(np_ ** (j - 1)))
        return jacobi(V1, P) * np_ ** (j - 1) * math.sqrt(np_)
    return 0.0


def gauss_sum_factored(V: Poly, f: Poly) -> complex:
    """G(V, chi_f) via multiplicativity over the prime powers of f."""
    if not f.is_monic() or f.is_constant():
        raise ValueError("modulus must be monic nonconstant")
    out: complex = 1.0
    for p, e in factor(f).factors:
        out *= gauss_sum_closed(V, p, e)
        if out == 0:
            return 0.0
    return out


# -- brute-force character-sum identities ------------------------------------


def _radical_divisor_budget(f: Poly, max_deg: int):
    """Monic C with primes among those of f and deg(C) <= max_deg."""
    primes = [p for p, _ in factor(f).factors] if f.degree() >= 1 else []
    degs = [p.degree() for p in primes]
    q = f.q
    if not primes:
        yield Poly.one(q)
        return
    ranges = [range(max_deg // d + 1) for d in degs]
    for exps in itertools.product(*ranges):
        if sum(e * d for e, d in zip(exps, degs)) > max_deg:
            continue
        c = Poly.one(q)
        for p, e in zip(primes, exps):
            for _ in range(e):
                c = c * p
        yield c


def _monic_char_sum(f: Poly, m: int) -> int:
    """sum over r in M_m of (r/f), exact integer (0 when m < 0)."""
    if m < 0:
        return 0
    return sum(jacobi(r, f) for r in enumerate_monic(f.q, m))


def family_char_sum_sides(f: Poly, g: int) -> tuple[int, int]:
    """Both sides of the square-free-family character sum identity.

    lhs enumerates D in H_{2g+1} directly; rhs runs over monic C supported on
    the primes of f paired with complete monic sums. Equality is the contract.
    """
    if not f.is_monic():
        raise ValueError("monic f required")
    q = f.q
    from .polyfq import is_squarefree

    lhs = 0
    for d in enumerate_monic(q, 2 * g + 1):
        if is_squarefree(d):
            lhs += jacobi(d, f) if f.degree() >= 1 else 1
    rhs = 0
    for c in _radical_divisor_budget(f, (2 * g + 1) // 2):
        rhs += _monic_char_sum(f, 2 * g + 1 - 2 * c.degree())
    for c in _radical_divisor_budget(f, (2 * g - 1) // 2):
        rhs -= q * _monic_char_sum(f, 2 * g - 1 - 2 * c.degree())
    return lhs, rhs


def monic_char_sum_sides(f: Poly, m: int) -> tuple[complex, complex]:
    """Complete monic character sum vs. its Gauss-sum closed form.

    Even deg(f) uses the G(0) + q*sum - sum arrangement over short V ranges;
    odd deg(f) uses the single full-degree V sum. Empty ranges contribute 0.
    """
    if not f.is_monic() or f.is_constant():
        raise ValueError("monic nonconstant f required")
    if m < 0:
        raise ValueError("m must be >= 0")
    q = f.q
    n = f.degree()
    direct = complex(_monic_char_sum(f, m))
    if n % 2 == 0:
        total = gauss_sum_factored(Poly.zero(q), f)
        for dv in range(0, n - m - 1):  # V in M_{<= n-m-2}
            for V in enumerate_monic(q, dv):
                total += q * gauss_sum_factored(V, f)
        for dv in range(0, n - m):  # V in M_{<= n-m-1}
            for V in enumerate_monic(q, dv):
                total -= gauss_sum_factored(V, f)
        closed = q**m / q**n * total
    else:
        total = 0.0
        if n - m - 1 >= 0:
            for V in enumerate_monic(q, n - m - 1):
                total += gauss_sum_factored(V, f)
        closed = q ** (m + 0.5) / q**n * total
    return direct, closed
