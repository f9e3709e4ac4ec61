"""Exact arithmetic in F_q[x] for prime q congruent to 1 mod 4.

Polynomials are immutable ascending coefficient tuples wrapped in :class:`Poly`.
All arithmetic is exact (Python integers); degrees in play are tiny, so the
schoolbook algorithms are deliberate.

Conventions used throughout the package:

* the zero polynomial has ``degree() == -1`` and is flagged by ``is_zero()``;
* ``|f| = q**f.degree()`` is the norm of a nonzero polynomial;
* the von Mangoldt function is measured in degree units, ``lam(P**k) = deg P``,
  so that ``sum(lam(f) for f in M_n) == q**n`` exactly;
* monic polynomials of degree n are canonically indexed by ``0 <= k < q**n``:
  the base-q digits of k are the coefficients of ``x**0 .. x**(n-1)``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence


class FieldError(ValueError):
    """The field size is not a prime congruent to 1 mod 4."""


def _is_prime_int(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@functools.lru_cache(maxsize=None)
def check_field(q: int) -> int:
    """Validate q (prime, q >= 5, q = 1 mod 4) and return it."""
    if not isinstance(q, int) or q < 5 or q % 4 != 1 or not _is_prime_int(q):
        raise FieldError(f"q must be a prime >= 5 with q = 1 (mod 4), got {q!r}")
    return q


class Poly:
    """A polynomial over F_q, immutable, coefficients ascending."""

    __slots__ = ("q", "coeffs")

    def __init__(self, q: int, coeffs: Sequence[int]):
        check_field(q)
        c = [int(a) % q for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def _raw(cls, q: int, coeffs: tuple[int, ...]) -> "Poly":
        # internal fast path: coeffs already normalized mod q, no trailing zeros
        self = object.__new__(cls)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "coeffs", coeffs)
        return self

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, q: int) -> "Poly":
        check_field(q)
        return cls._raw(q, ())

    @classmethod
    def one(cls, q: int) -> "Poly":
        check_field(q)
        return cls._raw(q, (1,))

    @classmethod
    def x(cls, q: int) -> "Poly":
        check_field(q)
        return cls._raw(q, (0, 1))

    @classmethod
    def constant(cls, q: int, c: int) -> "Poly":
        return cls(q, (c,))

    @classmethod
    def monic_from_index(cls, q: int, n: int, k: int) -> "Poly":
        """The k-th monic polynomial of degree n in canonical order."""
        check_field(q)
        if n < 0 or not 0 <= k < q**n:
            raise ValueError(f"index {k} out of range for degree {n}")
        digits = []
        for _ in range(n):
            digits.append(k % q)
            k //= q
        return cls(q, digits + [1])

    @classmethod
    def parse(cls, q: int, text: str) -> "Poly":
        """Parse either 'c0,c1,...,cn' or a symbolic form like 'x^3+2*x+1'."""
        check_field(q)
        s = text.strip().replace(" ", "")
        if not s:
            raise ValueError("empty polynomial literal")
        if "x" not in s:
            return cls(q, [int(t) for t in s.split(",")])
        coeffs: dict[int, int] = {}
        for term in s.replace("-", "+-").split("+"):
            if not term:
                continue
            neg = term.startswith("-")
            if neg:
                term = term[1:]
            if "x" in term:
                head, _, tail = term.partition("x")
                coef = int(head.rstrip("*")) if head.rstrip("*") else 1
                exp = int(tail[1:]) if tail.startswith("^") else 1
            else:
                coef, exp = int(term), 0
            coeffs[exp] = coeffs.get(exp, 0) + (-coef if neg else coef)
        out = [0] * (max(coeffs) + 1)
        for e, c in coeffs.items():
            out[e] = c
        return cls(q, out)

    # -- basic queries ------------------------------------------------

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def leading(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def norm(self) -> int:
        """|f| = q**deg(f) for nonzero f."""
        if not self.coeffs:
            raise ValueError("zero polynomial has no norm")
        return self.q ** self.degree()

    def monic_index(self) -> int:
        """Inverse of monic_from_index."""
        if not self.is_monic():
            raise ValueError("monic polynomial required")
        k = 0
        for c in reversed(self.coeffs[:-1]):
            k = k * self.q + c
        return k

    def to_text(self) -> str:
        """Canonical emission: ascending coefficient list."""
        if not self.coeffs:
            return "0"
        return ",".join(str(c) for c in self.coeffs)

    def __repr__(self) -> str:
        return f"Poly(q={self.q}, [{self.to_text()}])"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Poly)
            and self.q == other.q
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.q, self.coeffs))

    def _check_same_field(self, other: "Poly") -> None:
        if self.q != other.q:
            raise ValueError(f"mixed moduli: q={self.q} vs q={other.q}")

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        self._check_same_field(other)
        q = self.q
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        c = list(a)
        for i, v in enumerate(b):
            c[i] = (c[i] + v) % q
        while c and c[-1] == 0:
            c.pop()
        return Poly._raw(q, tuple(c))

    def __neg__(self) -> "Poly":
        q = self.q
        return Poly._raw(q, tuple((-v) % q for v in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check_same_field(other)
        q = self.q
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw(q, ())
        c = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    c[i + j] += ai * bj
        return Poly._raw(q, tuple(v % q for v in c))

    def scale(self, c: int) -> "Poly":
        c %= self.q
        if c == 0:
            return Poly._raw(self.q, ())
        return Poly._raw(self.q, tuple((v * c) % self.q for v in self.coeffs))

    def shift(self, k: int) -> "Poly":
        """Multiply by x**k."""
        if not self.coeffs:
            return self
        return Poly._raw(self.q, (0,) * k + self.coeffs)

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._check_same_field(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        q = self.q
        r = list(self.coeffs)
        d = other.coeffs
        dn = len(d) - 1
        inv_lead = pow(d[-1], q - 2, q)
        quo = [0] * max(len(r) - dn, 0)
        for i in range(len(r) - 1 - dn, -1, -1):
            t = (r[i + dn] * inv_lead) % q
            if t:
                quo[i] = t
                for j, dj in enumerate(d):
                    r[i + j] = (r[i + j] - t * dj) % q
        del r[dn:]
        while r and r[-1] == 0:
            r.pop()
        while quo and quo[-1] == 0:
            quo.pop()
        return Poly._raw(q, tuple(quo)), Poly._raw(q, tuple(r))

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        """Monic normalization (unit multiple)."""
        if self.is_zero():
            raise ValueError("zero polynomial cannot be normalized")
        lead = self.coeffs[-1]
        return self if lead == 1 else self.scale(pow(lead, self.q - 2, self.q))

    def gcd(self, other: "Poly") -> "Poly":
        """Monic greatest common divisor."""
        self._check_same_field(other)
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        if a.is_zero():
            return a
        return a.monic()

    def derivative(self) -> "Poly":
        q = self.q
        c = tuple((i * v) % q for i, v in enumerate(self.coeffs[1:], start=1))
        while c and c[-1] == 0:
            c = c[:-1]
        return Poly._raw(q, c)

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative exponent")
        out = Poly.one(self.q)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def powmod(self, e: int, modulus: "Poly") -> "Poly":
        """self**e mod modulus by square-and-multiply."""
        if e < 0:
            raise ValueError("negative exponent")
        if modulus.is_zero():
            raise ZeroDivisionError("zero modulus")
        result = Poly.one(self.q)
        base = self % modulus
        while e:
            if e & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return result

    def __call__(self, a: int) -> int:
        """Evaluate at a scalar (Horner)."""
        q = self.q
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * a + c) % q
        return acc


# -- enumeration -----------------------------------------------------------


def monic_count(q: int, n: int) -> int:
    check_field(q)
    if n < 0:
        raise ValueError("degree must be >= 0")
    return q**n


def enumerate_monic(q: int, n: int) -> Iterator[Poly]:
    """All monic polynomials of degree n, in canonical index order."""
    check_field(q)
    if n < 0:
        raise ValueError("degree must be >= 0")
    for digits in itertools.product(range(q), repeat=n):
        yield Poly(q, list(reversed(digits)) + [1])


def enumerate_monic_upto(q: int, n: int) -> Iterator[Poly]:
    """All monic polynomials of degree 0..n (empty if n < 0)."""
    for m in range(n + 1):
        yield from enumerate_monic(q, m)


def squarefree_count(q: int, n: int) -> int:
    """#H_n: q**n - q**(n-1) for n >= 2, q**n for n in {0, 1}."""
    check_field(q)
    if n < 0:
        raise ValueError("degree must be >= 0")
    if n < 2:
        return q**n
    return q**n - q ** (n - 1)


def is_squarefree(f: Poly) -> bool:
    """True iff no prime square divides f; gcd(f, f') test."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    if f.is_constant():
        return True
    fp = f.derivative()
    if fp.is_zero():
        # f is a perfect q-th power in characteristic q
        return False
    return f.gcd(fp).is_one()


# -- primes and factorization ----------------------------------------------


@functools.lru_cache(maxsize=None)
def _int_factor(n: int) -> tuple[int, ...]:
    """Prime factors of a positive integer, without multiplicity."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def int_mobius(n: int) -> int:
    if n < 1:
        raise ValueError("positive integer required")
    mu = 1
    for p in _int_factor(n):
        if n % (p * p) == 0:
            return 0
        mu = -mu
    return mu


def int_divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def prime_count(q: int, d: int) -> int:
    """pi_q(d) = (1/d) * sum_{e | d} mu(e) q**(d/e), the necklace count."""
    check_field(q)
    if d <= 0:
        raise ValueError("degree must be >= 1")
    total = sum(int_mobius(e) * q ** (d // e) for e in int_divisors(d))
    assert total % d == 0
    return total // d


@functools.lru_cache(maxsize=None)
def prime_polys(q: int, d: int) -> tuple[Poly, ...]:
    """All monic irreducibles of degree d, canonical order (cached)."""
    check_field(q)
    if d <= 0:
        raise ValueError("degree must be >= 1")
    if d == 1:
        return tuple(Poly(q, (a, 1)) for a in range(q))
    small = [p for dd in range(1, d // 2 + 1) for p in prime_polys(q, dd)]
    out = []
    for f in enumerate_monic(q, d):
        if all(not (f % p).is_zero() for p in small):
            out.append(f)
    assert len(out) == prime_count(q, d)
    return tuple(out)


def is_irreducible(f: Poly) -> bool:
    if f.is_zero() or f.is_constant():
        return False
    d = f.degree()
    g = f.monic()
    if d <= 6:
        return g in set(prime_polys(f.q, d))
    return len(factor(f).factors) == 1 and factor(f).factors[0][1] == 1


@dataclass(frozen=True)
class Factorization:
    """unit * prod(prime**exp) with distinct monic irreducible primes."""

    unit: int
    factors: tuple[tuple[Poly, int], ...]

    def value(self, q: int) -> Poly:
        out = Poly.constant(q, self.unit)
        for p, e in self.factors:
            for _ in range(e):
                out = out * p
        return out


@functools.lru_cache(maxsize=1 << 16)
def factor(f: Poly) -> Factorization:
    """Factor by trial division against the prime tables (cached).

    Degrees in play are <= 2g+1, so trial division up to deg(f)//2 plus a
    prime remainder is all that is ever needed.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    q = f.q
    unit = f.leading()
    g = f.monic()
    factors: list[tuple[Poly, int]] = []
    d = 1
    while 2 * d <= g.degree():
        for p in prime_polys(q, d):
            if g.degree() < 2 * d:
                break
            e = 0
            while (g % p).is_zero():
                g = g // p
                e += 1
            if e:
                factors.append((p, e))
        d += 1
    if g.degree() >= 1:
        factors.append((g, 1))
    factors.sort(key=lambda pe: (pe[0].degree(), pe[0].monic_index()))
    return Factorization(unit, tuple(factors))


def squarefree_part(f: Poly) -> tuple[Poly, Poly]:
    """Decompose monic f = h1 * h2**2 with h1 square-free; returns (h1, h2)."""
    if not f.is_monic():
        raise ValueError("monic polynomial required")
    h1 = Poly.one(f.q)
    h2 = Poly.one(f.q)
    for p, e in factor(f).factors:
        if e % 2:
            h1 = h1 * p
        for _ in range(e // 2):
            h2 = h2 * p
    return h1, h2


# -- arithmetic functions ---------------------------------------------------


def mobius(f: Poly) -> int:
    """mu(f): (-1)**(number of primes) on square-free monic f, else 0."""
    if not f.is_monic():
        raise ValueError("monic polynomial required")
    facs = factor(f).factors
    if any(e > 1 for _, e in facs):
        return 0
    return -1 if len(facs) % 2 else 1


def von_mangoldt(f: Poly) -> int:
    """Lambda(f) in degree units: deg(P) if f = P**k, else 0."""
    if not f.is_monic():
        raise ValueError("monic polynomial required")
    facs = factor(f).factors
    if len(facs) == 1:
        return facs[0][0].degree()
    return 0


def nu(f: Poly) -> Fraction:
    """The multiplicative function with nu(P**a) = 1/a!."""
    if not f.is_monic():
        raise ValueError("monic polynomial required")
    out = Fraction(1)
    for _, e in factor(f).factors:
        fact = 1
        for i in range(2, e + 1):
            fact *= i
        out /= fact
    return out


def euler_phi(f: Poly) -> int:
    """#(F_q[x]/f)^* for nonzero f."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    out = 1
    for p, e in factor(f).factors:
        np_ = p.norm()
        out *= np_ ** (e - 1) * (np_ - 1)
    return out


# -- prime table -------------------------------------------------------------


@dataclass(frozen=True)
class PrimeTable:
    """Monic irreducibles listed by degree plus closed-form counts."""

    q: int
    max_listed: int
    by_degree: dict[int, tuple[Poly, ...]]
    counts: dict[int, int]


def build_prime_table(q: int, max_listed: int, count_to: int | None = None) -> PrimeTable:
    check_field(q)
    count_to = max(count_to or 0, max_listed)
    by_degree = {d: prime_polys(q, d) for d in range(1, max_listed + 1)}
    counts = {d: prime_count(q, d) for d in range(1, count_to + 1)}
    return PrimeTable(q, max_listed, by_degree, counts)
