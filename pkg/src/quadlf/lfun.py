"""Exact L-polynomials for square-free monic D of odd degree.

For D in H_{2g+1} the L-function is the degree-2g polynomial
``L(u) = sum c_n u^n`` with integer coefficients, c_0 = 1, satisfying the
symmetry c_{2g-n} = q**(g-n) c_n. Coefficients are computed either through
the prime power-sum recursion (n c_n = sum b_m c_{n-m}, with b_m needing only
prime symbols up to degree m) or by direct enumeration of monic polynomials,
which serves as the oracle for the recursion.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import mainterms
from .chars import jacobi
from .kernels.pipeline import zero_angles
from .polyfq import Poly, enumerate_monic, factor, is_squarefree, prime_polys


@dataclass(frozen=True)
class LPolynomial:
    q: int
    g: int
    c: tuple[int, ...]
    source: Poly

    def to_csv_row(self) -> str:
        cells = [self.q, self.g, *self.source.coeffs, *self.c]
        return ",".join(str(v) for v in cells)

    @classmethod
    def from_csv_row(cls, row: str) -> "LPolynomial":
        vals = [int(v) for v in row.strip().split(",")]
        q, g = vals[0], vals[1]
        d = vals[2 : 2 + 2 * g + 2]
        c = vals[2 + 2 * g + 2 :]
        if len(c) != 2 * g + 1:
            raise ValueError("malformed L-polynomial row")
        return cls(q, g, tuple(c), Poly(q, d))


@dataclass(frozen=True)
class ZeroSet:
    thetas: tuple[float, ...]
    radii_residual: float


@dataclass(frozen=True)
class TrigPoly:
    """Real even trigonometric polynomial, stored by its coefficients h^(n).

    coeffs[n] is h^(n) for n >= 0; evenness h^(-n) = h^(n) is built in, so
    h(theta) = coeffs[0] + 2 * sum_{n>=1} coeffs[n] cos(2 pi n theta).
    """

    coeffs: tuple[float, ...]

    @property
    def support(self) -> int:
        return len(self.coeffs) - 1

    def hhat(self, n: int) -> float:
        n = abs(n)
        return self.coeffs[n] if n <= self.support else 0.0

    def __call__(self, theta: float) -> float:
        out = self.coeffs[0]
        for n in range(1, len(self.coeffs)):
            out += 2 * self.coeffs[n] * math.cos(2 * math.pi * n * theta)
        return out


def _require_family_member(D: Poly) -> int:
    """Validate D in H_{2g+1} and return g."""
    if not D.is_monic() or D.degree() < 3 or D.degree() % 2 == 0:
        raise ValueError("D must be monic of odd degree 2g+1 >= 3")
    if not is_squarefree(D):
        raise ValueError("D must be square-free")
    return (D.degree() - 1) // 2


def chi_on_primes(D: Poly, max_d: int) -> dict[Poly, int]:
    """chi_D(P) for every monic irreducible P with deg(P) <= max_d."""
    _require_family_member(D)
    out: dict[Poly, int] = {}
    for d in range(1, max_d + 1):
        for p in prime_polys(D.q, d):
            out[p] = jacobi(D, p)
    return out


def prime_power_sums(D: Poly, nmax: int) -> list[int]:
    """b_m = sum over M_m of Lambda(f) chi_D(f) for m = 1..nmax, via primes.

    Grouped by prime degree: powers chi**j collapse to chi for odd j and to
    the nonzero indicator for even j.
    """
    q = D.q
    s = [0] * (nmax + 1)
    z = [0] * (nmax + 1)
    pi = [0] * (nmax + 1)
    for d in range(1, nmax + 1):
        primes = prime_polys(q, d)
        pi[d] = len(primes)
        for p in primes:
            v = jacobi(D, p)
            s[d] += v
            z[d] += v == 0
    out = [0] * (nmax + 1)
    for m in range(1, nmax + 1):
        acc = 0
        for d in range(1, m + 1):
            if m % d == 0:
                acc += d * (s[d] if (m // d) % 2 else pi[d] - z[d])
        out[m] = acc
    return out[1:]


def l_coefficients(D: Poly, mode: str = "recursion") -> LPolynomial:
    """Compute the L-polynomial of chi_D.

    mode "recursion": Newton recursion up to n = g, rest by symmetry.
    mode "recursion_full": recursion all the way to 2g (no symmetry fill),
    used to make the functional-equation check non-vacuous.
    mode "direct": c_n = sum over M_n of chi_D(f) by enumeration (oracle).
    """
    g = _require_family_member(D)
    q = D.q
    if mode == "direct":
        c = [1] + [
            sum(jacobi(D, f) for f in enumerate_monic(q, n))
            for n in range(1, 2 * g + 1)
        ]
        return LPolynomial(q, g, tuple(c), D)
    if mode == "recursion":
        top = g
    elif mode == "recursion_full":
        top = 2 * g
    else:
        raise ValueError(f"unknown mode {mode!r}")
    b = [0] + prime_power_sums(D, top)
    c = [0] * (2 * g + 1)
    c[0] = 1
    for n in range(1, top + 1):
        acc = sum(b[m] * c[n - m] for m in range(1, n + 1))
        if acc % n:
            raise ArithmeticError("coefficient recursion produced a non-integer")
        c[n] = acc // n
    for n in range(top + 1, 2 * g + 1):
        c[n] = q ** (n - g) * c[2 * g - n]
    return LPolynomial(q, g, tuple(c), D)


def verify_functional_equation(L: LPolynomial) -> int:
    """max_n |c_{2g-n} - q**(g-n) c_n| over 0 <= n <= g; exact integer."""
    q, g, c = L.q, L.g, L.c
    return max(abs(c[2 * g - n] - q ** (g - n) * c[n]) for n in range(g + 1))


def power_sums(L: LPolynomial, nmax: int) -> list[int]:
    """S_n for n = 1..nmax by Newton's identity (exact integers)."""
    g, c = L.g, L.c
    S = [0] * (nmax + 1)
    for n in range(1, nmax + 1):
        acc = n * c[n] if n <= 2 * g else 0
        for m in range(1, n):
            if n - m <= 2 * g:
                acc -= S[m] * c[n - m]
        S[n] = acc
    return S[1:]


def evaluate_shifted(L: LPolynomial, alpha: complex, t: float = 0.0) -> complex:
    """L(1/2 + alpha + it, chi_D), i.e. the polynomial at u = q**(-1/2-alpha-it)."""
    u = cmath.exp(-(0.5 + alpha + 1j * t) * math.log(L.q))
    acc: complex = 0.0
    for coef in reversed(L.c):
        acc = acc * u + coef
    return acc


def approx_fe_product(D: Poly, shifts) -> complex:
    """Product of shifted L-values via the exact two-sum expansion.

    sum over M_{<= kg} of tau_A(f) chi_D(f)/sqrt|f| plus q**(-2g sum A) times
    the reflected sum over M_{<= kg-1}; equals prod_j L(1/2+alpha_j, chi_D).
    """
    g = _require_family_member(D)
    q = D.q
    shifts = [complex(a) for a in shifts]
    k = len(shifts)
    if k < 1:
        raise ValueError("at least one shift required")

    def tau(f: Poly, gamma) -> complex:
        out: complex = 1.0
        for p, e in factor(f).factors:
            out *= mainterms.tau_prime_power(gamma, q, p.degree(), e)
        return out

    def one_sum(top: int, gamma) -> complex:
        total: complex = 0.0
        for n in range(0, top + 1):
            scale = q ** (-n / 2)
            for f in enumerate_monic(q, n):
                ch = jacobi(D, f) if n else 1
                if ch:
                    total += tau(f, gamma) * ch * scale
        return total

    reflected = [-a for a in shifts]
    qfac = cmath.exp(-2 * g * sum(shifts) * math.log(q))
    return one_sum(k * g, shifts) + qfac * one_sum(k * g - 1, reflected)


def zeros(L: LPolynomial) -> ZeroSet:
    """Zero angles of the L-polynomial (companion eigenvalues + polish)."""
    c = np.array([L.c], dtype=np.int64)
    try:
        theta, resid = zero_angles(c, L.q, L.g)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(f"eigensolver failed for D={L.source!r}: {exc}") from exc
    return ZeroSet(tuple(float(t) for t in theta[0]), float(resid[0]))


def explicit_formula_residual(D: Poly, h: TrigPoly) -> float:
    """|zero-side minus prime-side| of the explicit formula for h.

    zero side: sum_j h(theta_j); prime side: 2g h^(0) minus
    2 sum_{n <= N} h^(n) q**(-n/2) S_n. The integral term is h^(0).
    """
    g = _require_family_member(D)
    q = D.q
    L = l_coefficients(D)
    zs = zeros(L)
    zero_side = math.fsum(h(t) for t in zs.thetas)
    N = h.support
    S = power_sums(L, N) if N >= 1 else []
    prime_side = 2 * g * h.hhat(0)
    for n in range(1, N + 1):
        prime_side -= 2 * h.hhat(n) * q ** (-n / 2) * S[n - 1]
    return abs(zero_side - prime_side)
