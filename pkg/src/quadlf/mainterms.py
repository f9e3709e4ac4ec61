"""Predicted main terms: zeta_q, shifted divisor functions, Euler products.

Every Euler factor that appears here depends on the prime P only through its
degree, so infinite products are evaluated degree-grouped as
``factor(q**d, d) ** pi_q(d)`` with the closed-form necklace count pi_q(d).
Truncation depth is chosen adaptively: degrees are consumed until the
geometric tail estimate drops below the requested tolerance (cap 200).

Shift-set windows follow the convergence constraints of the ratio asymptotics:
numerator shifts |Re a| < 1/4, denominator shifts 0 < Re b < 1/4, and any two
shifts whose sum hits a zeta_q pole must be separated by at least 1e-6
(confluent shifts are not implemented).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .polyfq import Poly, check_field, factor, prime_count, squarefree_part

POLE_TOL = 1e-6
SERIES_TOL = 1e-16
MAX_PRIME_DEGREE = 200


class PoleError(ArithmeticError):
    """A zeta_q argument (or shift pair) sits on a pole."""


class DivergenceError(ArithmeticError):
    """An Euler factor or inner series is outside its convergence region."""


def zeta_q(q: int, s: complex) -> complex:
    """zeta_q(s) = 1 / (1 - q**(1-s)), with a pole at s = 1."""
    check_field(q)
    w = 1 - cmath.exp((1 - s) * math.log(q))
    if abs(w) < POLE_TOL:
        raise PoleError(f"zeta_q pole at s={s}")
    return 1 / w


def zeta_u(q: int, u: complex) -> complex:
    """Z(u) = 1 / (1 - q u), the same function in the u variable."""
    check_field(q)
    w = 1 - q * u
    if abs(w) < POLE_TOL:
        raise PoleError(f"Z pole at u={u}")
    return 1 / w


def zeta_q_recip(q: int, s: complex) -> complex:
    """1 / zeta_q(s) = 1 - q**(1-s); entire, vanishes at the zeta_q pole."""
    check_field(q)
    return 1 - cmath.exp((1 - s) * math.log(q))


def _qpow(q: int, z: complex) -> complex:
    return cmath.exp(z * math.log(q))


# -- shifted divisor functions ------------------------------------------------


def tau_prime_power(shifts: Sequence[complex], q: int, d: int, j: int) -> complex:
    """tau_C(P**j) for deg(P) = d: coefficient of x**j in prod 1/(1 - x q**(-d g_i)).

    Complete homogeneous symmetric function of the weights q**(-d gamma_i).
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    t = [_qpow(q, -d * complex(gm)) for gm in shifts]
    E = _elementary(t)  # E[i] = coefficient of x**i in prod (1 - t_i x)
    h = [0j] * (j + 1)
    h[0] = 1.0
    for n in range(1, j + 1):
        acc = 0j
        for i in range(1, min(n, len(t)) + 1):
            acc += E[i] * h[n - i]
        h[n] = -acc
    return h[j]


def mu_prime_power(shifts: Sequence[complex], q: int, d: int, j: int) -> complex:
    """mu_C(P**j) for deg(P) = d: coefficient of x**j in prod (1 - x q**(-d g_i))."""
    if j < 0:
        raise ValueError("j must be >= 0")
    t = [_qpow(q, -d * complex(gm)) for gm in shifts]
    if j > len(t):
        return 0j
    return _elementary(t)[j]


def _elementary(t: list[complex]) -> list[complex]:
    E = [1.0 + 0j] + [0j] * len(t)
    for ti in t:
        for i in range(len(E) - 1, 0, -1):
            E[i] = E[i] - ti * E[i - 1]
    return E


def tau_general(shifts: Sequence[complex], f: Poly, mode: str = "multiplicative") -> complex:
    """tau_C(f): sum over ordered factorizations f = f_1 ... f_k of prod |f_i|**(-g_i)."""
    if not f.is_monic():
        raise ValueError("monic f required")
    q = f.q
    if mode == "multiplicative":
        out: complex = 1.0
        for p, e in factor(f).factors:
            out *= tau_prime_power(shifts, q, p.degree(), e)
        return out
    if mode != "brute":
        raise ValueError(f"unknown mode {mode!r}")

    def divisors(poly: Poly) -> list[Poly]:
        facs = factor(poly).factors
        out = [Poly.one(q)]
        for p, e in facs:
            out = [d * p**i for d in out for i in range(e + 1)]
        return out

    def rec(poly: Poly, remaining: int) -> complex:
        if remaining == 1:
            return _qpow(q, -poly.degree() * complex(shifts[len(shifts) - 1]))
        idx = len(shifts) - remaining
        total = 0j
        for dvs in divisors(poly):
            total += _qpow(q, -dvs.degree() * complex(shifts[idx])) * rec(
                poly // dvs, remaining - 1
            )
        return total

    return rec(f, len(shifts))


# -- twist decomposition -------------------------------------------------------


@dataclass(frozen=True)
class TwistPoly:
    """Monic twist h with its unique decomposition h = h1 * h2**2, h1 square-free."""

    h: Poly
    h1: Poly
    h2: Poly

    @classmethod
    def from_poly(cls, h: Poly) -> "TwistPoly":
        h1, h2 = squarefree_part(h)
        return cls(h, h1, h2)


# -- degree-grouped Euler products ----------------------------------------------


@dataclass(frozen=True)
class EulerTruncation:
    max_prime_degree: int
    tail_estimate: float


def _log1p(z: complex) -> complex:
    """log(1+z) accurate for tiny complex z (three-term series below 1e-4)."""
    if abs(z) < 1e-4:
        return z * (1 - z * (0.5 - z / 3))
    return cmath.log(1 + z)


def _grouped_product(
    q: int,
    deviations_fn: Callable[[int], list[tuple[complex, int]]],
    tol: float,
    ratio_hint: float,
) -> tuple[complex, EulerTruncation]:
    """prod over degrees d of prod_i (1 + x_i(d))**(s_i pi_q(d)).

    deviations_fn(d) yields the per-degree factor deviations (x_i, s_i) with
    s_i = +-1. Deviations are combined through log1p so that the first-order
    cancellations between blocks survive in floating point; without this the
    factors round to 1.0 while their pi_q(d)-amplified contribution is still
    far above tolerance. Tail after the last degree is estimated geometrically
    from max(ratio_hint, observed decay), clipped below 0.95.
    """
    log_sum = 0j
    r_prev = 0.0
    d = 0
    while True:
        d += 1
        if d > MAX_PRIME_DEGREE:
            raise DivergenceError(
                f"Euler product did not reach tolerance {tol} by degree {MAX_PRIME_DEGREE}"
            )
        lf = 0j
        for x, s in deviations_fn(d):
            if abs(1 + x) < 1e-300:
                raise PoleError(f"vanishing Euler factor at prime degree {d}")
            lf += s * _log1p(x)
        pi_d = prime_count(q, d)
        r_d = abs(lf) * pi_d
        log_sum += pi_d * lf
        if d >= 2:
            rho = ratio_hint
            if r_prev > 0 and r_d > 0:
                rho = max(rho, r_d / r_prev)
            rho = min(rho, 0.95)
            tail = r_d * rho / (1 - rho)
            if tail < tol and r_d < tol:
                return cmath.exp(log_sum), EulerTruncation(d, tail)
        r_prev = r_d


def _pairs_leq(k: int):
    return [(i, j) for i in range(k) for j in range(i, k)]


def _min_pair_re(shifts: Sequence[complex]) -> float:
    return min(
        (complex(shifts[i]) + complex(shifts[j])).real
        for i, j in _pairs_leq(len(shifts))
    )


def euler_a(
    shifts: Sequence[complex], q: int, u: complex, tol: float = 1e-10
) -> tuple[complex, EulerTruncation]:
    """The shift-dependent Euler product of the twisted-moment main term.

    factor(d) = prod_{i<=j} (1 - u**(2d) q**(-d(1+g_i+g_j)))
                * (1 + (1+q**(-d))**(-1) sum_{j>=1} tau_C(P**(2j)) (u**(2d)/q**d)**j).
    """
    check_field(q)
    shifts = [complex(a) for a in shifts]
    m = _min_pair_re(shifts)
    if abs(u) ** 2 * q ** (-(1 + m)) >= 1 - 1e-9:
        raise DivergenceError(
            f"|u|^2 q^(-1-min pair re) = {abs(u)**2 * q**(-(1+m)):.4g} >= 1: "
            "outside the convergence region"
        )

    def deviations_fn(d: int) -> list[tuple[complex, int]]:
        u2d = u ** (2 * d)
        out = [
            (-u2d * _qpow(q, -d * (1 + shifts[i] + shifts[j])), 1)
            for i, j in _pairs_leq(len(shifts))
        ]
        x2 = u2d * _qpow(q, -d)  # x**2 with x = u**d q**(-d/2)
        out.append((_even_tau_series_sq(shifts, q, d, x2, 1) / (1 + q ** (-d)), 1))
        return out

    ratio_hint = abs(u) ** 2 * q ** (-(1 + 2 * m))
    return _grouped_product(q, deviations_fn, tol, ratio_hint)


def _even_tau_series_sq(
    shifts: Sequence[complex], q: int, d: int, x2: complex, first: int
) -> complex:
    """sum_{j >= first} tau_C(P**(2j)) x2**j (x2 standing for x**2)."""
    total = 0j
    j = first
    prev = math.inf
    while True:
        term = tau_prime_power(shifts, q, d, 2 * j) * x2**j
        total += term
        mag = abs(term)
        if mag < SERIES_TOL and j > first + 1:
            return total
        if j > 400 or (mag > prev and mag > 1e9):
            raise DivergenceError(f"inner series divergent at prime degree {d}")
        prev = mag if mag > 0 else prev
        j += 1


def euler_b(
    shifts: Sequence[complex], twist: TwistPoly, u: complex
) -> complex:
    """Finite Euler product over the primes of the twist (three-part form)."""
    q = twist.h.q
    shifts = [complex(a) for a in shifts]
    out: complex = 1.0
    for p, _ in factor(twist.h).factors:
        d = p.degree()
        x2 = u ** (2 * d) * _qpow(q, -d)
        head = 1 + q ** (-d) + _even_tau_series_sq(shifts, q, d, x2, 1)
        out /= head
    if twist.h1.degree() >= 1:
        for p, _ in factor(twist.h1).factors:
            d = p.degree()
            x2 = u ** (2 * d) * _qpow(q, -d)
            total = 0j
            j = 0
            while True:
                term = tau_prime_power(shifts, q, d, 2 * j + 1) * x2**j
                total += term
                if abs(term) < SERIES_TOL and j > 1:
                    break
                if j > 400:
                    raise DivergenceError("odd prime-power series divergent")
                j += 1
            out *= total
    if twist.h2.degree() >= 1:
        for p, _ in factor(twist.h2).factors:
            if (twist.h1 % p).is_zero():
                continue
            d = p.degree()
            x2 = u ** (2 * d) * _qpow(q, -d)
            out *= 1 + _even_tau_series_sq(shifts, q, d, x2, 1)
    return out


# -- main terms -----------------------------------------------------------------


def _validate_numerators(shifts: Sequence[complex], limit: float = 0.25) -> list[complex]:
    out = [complex(a) for a in shifts]
    for a in out:
        if abs(a.real) >= limit:
            raise ValueError(f"numerator shift {a} outside |Re| < {limit}")
    return out


def _validate_denominators(shifts: Sequence[complex]) -> list[complex]:
    # Re b > 0 is all the main term itself needs; the asymptotic guarantee of
    # the underlying theorems lives in Re b < 1/2 (conjectured power saving in
    # Re b < 1/4), and large Re b is the denominator-free moment limit.
    out = [complex(b) for b in shifts]
    for b in out:
        if not b.real > 0:
            raise ValueError(f"denominator shift {b} needs Re > 0")
    return out


def _check_pair_poles(shifts: Sequence[complex]) -> None:
    for i, j in _pairs_leq(len(shifts)):
        if abs(shifts[i] + shifts[j]) < POLE_TOL:
            raise PoleError(
                f"shift pair {shifts[i]}, {shifts[j]} sums to ~0 (zeta_q pole); "
                "separate shifts by at least 1e-6"
            )


def s_tilde(
    shifts: Sequence[complex], twist: TwistPoly, q: int, tol: float = 1e-10
) -> tuple[complex, EulerTruncation]:
    """A_C(1) * B_C(h; 1) * prod_{i<=j} zeta_q(1 + g_i + g_j)."""
    shifts = [complex(a) for a in shifts]
    _check_pair_poles(shifts)
    a_val, trunc = euler_a(shifts, q, 1.0, tol)
    b_val = euler_b(shifts, twist, 1.0)
    zfac: complex = 1.0
    for i, j in _pairs_leq(len(shifts)):
        zfac *= zeta_q(q, 1 + shifts[i] + shifts[j])
    return a_val * b_val * zfac, trunc


def _subset_reflections(alphas: list[complex]):
    k = len(alphas)
    for mask in range(1 << k):
        refl = [(-a if (mask >> i) & 1 else a) for i, a in enumerate(alphas)]
        ssum = sum(a for i, a in enumerate(alphas) if (mask >> i) & 1)
        yield refl, ssum


def twisted_main(
    q: int, g: int, alphas: Sequence[complex], h: Poly | TwistPoly, tol: float = 1e-10
) -> tuple[complex, EulerTruncation]:
    """Predicted twisted shifted moment over the degree-(2g+1) family.

    (1/sqrt|h1|) * sum over subsets R of A of q**(-2g sum R) * S-tilde on the
    set with R reflected.
    """
    check_field(q)
    alphas = _validate_numerators(alphas)
    twist = h if isinstance(h, TwistPoly) else TwistPoly.from_poly(h)
    total = 0j
    worst = EulerTruncation(0, 0.0)
    for refl, ssum in _subset_reflections(alphas):
        val, trunc = s_tilde(refl, twist, q, tol)
        total += _qpow(q, -2 * g * ssum) * val
        if trunc.tail_estimate >= worst.tail_estimate:
            worst = trunc
    return total / math.sqrt(twist.h1.norm()), worst


def ratios_s_term(
    gammas: Sequence[complex],
    betas: Sequence[complex],
    q: int,
    tol: float = 1e-10,
) -> tuple[complex, EulerTruncation]:
    """One S-term of the ratio prediction for numerator set C and denominators B."""
    k = len(gammas)
    gammas = [complex(x) for x in gammas]
    betas = [complex(x) for x in betas]
    _check_pair_poles(gammas)

    # beta_i + gamma_j = 0 is harmless: that zeta_q sits in the denominator,
    # so the S-term picks up an exact zero (the confluent A = B limit).
    zblock: complex = 1.0
    for i, j in _pairs_leq(k):
        zblock *= zeta_q(q, 1 + gammas[i] + gammas[j])
    for i in range(k):
        for j in range(i + 1, k):
            zblock *= zeta_q(q, 1 + betas[i] + betas[j])
    for i in range(k):
        for j in range(k):
            zblock *= zeta_q_recip(q, 1 + betas[i] + gammas[j])

    def deviations_fn(d: int) -> list[tuple[complex, int]]:
        out: list[tuple[complex, int]] = []
        for i, j in _pairs_leq(k):
            out.append((-_qpow(q, -d * (1 + gammas[i] + gammas[j])), 1))
        for i in range(k):
            for j in range(i + 1, k):
                out.append((-_qpow(q, -d * (1 + betas[i] + betas[j])), 1))
        for i in range(k):
            for j in range(k):
                out.append((-_qpow(q, -d * (1 + betas[i] + gammas[j])), -1))
        inner = 0j
        root = _qpow(q, -d * 0.5)
        for i in range(k + 1):
            mu_i = mu_prime_power(betas, q, d, i)
            if i and abs(mu_i) == 0:
                continue
            j = 2 - i if i < 2 else (i % 2)
            prev = math.inf
            while True:
                term = mu_i * tau_prime_power(gammas, q, d, j) * root ** (i + j)
                inner += term
                mag = abs(term)
                if mag < SERIES_TOL and j > 4:
                    break
                if j > 400 or (mag > prev and mag > 1e9):
                    raise DivergenceError(f"ratio inner series divergent at degree {d}")
                prev = mag if mag > 0 else prev
                j += 2
        out.append((inner / (1 + q ** (-d)), 1))
        return out

    m = min(_min_pair_re(gammas), min((b + gm).real for b in betas for gm in gammas))
    ratio_hint = q ** (-(1 + 2 * m))
    val, trunc = _grouped_product(q, deviations_fn, tol, ratio_hint)
    return zblock * val, trunc


def ratios_main(
    q: int,
    g: int,
    alphas: Sequence[complex],
    betas: Sequence[complex],
    tol: float = 1e-10,
) -> tuple[complex, EulerTruncation]:
    """Predicted average of prod L(1/2+a_j) / prod L(1/2+b_j) over the family."""
    check_field(q)
    alphas = _validate_numerators(alphas)
    betas = _validate_denominators(betas)
    if len(alphas) != len(betas):
        raise ValueError("numerator and denominator shift sets must have equal size")
    total = 0j
    worst = EulerTruncation(0, 0.0)
    for refl, ssum in _subset_reflections(alphas):
        val, trunc = ratios_s_term(refl, betas, q, tol)
        total += _qpow(q, -2 * g * ssum) * val
        if trunc.tail_estimate >= worst.tail_estimate:
            worst = trunc
    return total, worst


def ratio_k1_closed(
    q: int, g: int, alpha: complex, beta: complex, tol: float = 1e-10
) -> tuple[complex, EulerTruncation]:
    """Closed form of the one-over-one ratio prediction.

    A(a,b) zeta_q(1+2a)/zeta_q(1+a+b) + q**(-2g a) A(-a,b) zeta_q(1-2a)/zeta_q(1-a+b),
    with A the compensated Euler product, degree-grouped.
    """
    check_field(q)
    (alpha,) = _validate_numerators([alpha])
    (beta,) = _validate_denominators([beta])
    if abs(alpha) < POLE_TOL:
        raise PoleError("alpha ~ 0 hits the zeta_q(1 +- 2 alpha) pole")

    def a_product(a: complex, b: complex) -> tuple[complex, EulerTruncation]:
        def deviations_fn(d: int) -> list[tuple[complex, int]]:
            qd = q**d
            return [
                (-_qpow(q, -d * (1 + a + b)), -1),
                (
                    -_qpow(q, -d * (a + b)) / (qd + 1)
                    - _qpow(q, -d * (1 + 2 * a)) / (qd + 1),
                    1,
                ),
            ]

        m = min((a + b).real, (2 * a).real, 0.0)
        return _grouped_product(q, deviations_fn, tol, q ** (-(1 + m)))

    a_plus, t1 = a_product(alpha, beta)
    a_minus, t2 = a_product(-alpha, beta)
    # the zeta_q's dividing out sit in denominators: alpha = beta is regular
    val = a_plus * zeta_q(q, 1 + 2 * alpha) * zeta_q_recip(q, 1 + alpha + beta)
    val += (
        _qpow(q, -2 * g * alpha)
        * a_minus
        * zeta_q(q, 1 - 2 * alpha)
        * zeta_q_recip(q, 1 - alpha + beta)
    )
    worst = t1 if t1.tail_estimate >= t2.tail_estimate else t2
    return val, worst


def density_main(
    q: int, g: int, phihat: Sequence[float], N: int
) -> tuple[float, bool]:
    """Predicted one-level density for a test function given by samples.

    phihat[n] is the transform evaluated at n/(2g), n = 0..N (zero beyond N).
    Returns (value, support_warning) where the warning flags N >= 4g, outside
    the validity window; the value is still computed.
    """
    check_field(q)
    if g < 1 or N < 0:
        raise ValueError("g >= 1 and N >= 0 required")
    warn = N >= 4 * g

    def at_over_g(n: int) -> float:
        return phihat[2 * n] if 2 * n <= N and 2 * n < len(phihat) else 0.0

    val = float(phihat[0])
    for n in range(1, g + 1):
        val -= at_over_g(n) / g
    val -= at_over_g(g) / (g * (q - 1))
    for n in range(1, N // 2 + 1):
        prime_sum = math.fsum(
            d * prime_count(q, d) / (q**d + 1) for d in range(1, n + 1) if n % d == 0
        )
        val += at_over_g(n) * q ** (-n) * prime_sum / g
    return val, warn
