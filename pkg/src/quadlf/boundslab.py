"""Negative-moment machinery at the statement level.

Covers the majorant coefficients b_beta(n), the pointwise lower bound on
log|L| they certify, the appendix trigonometric sum, and negative-moment
scaling scans. The O(1) constants of the underlying statements are calibrated
once on reference runs and frozen as regression thresholds; they are not
mathematical claims.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import ensemble
from .kernels import get_backend
from .kernels import pipeline as pl
from .lfun import evaluate_shifted, l_coefficients, power_sums
from .polyfq import Poly, check_field

B_SERIES_TOL = 1e-14


def tbar(t: float) -> float:
    """min{t mod 2pi, 2pi - (t mod 2pi)}, in [0, pi]."""
    r = t % (2 * math.pi)
    return min(r, 2 * math.pi - r)


def majorant_floor(q: int, beta: float, N: int, g: int) -> float:
    """(2g/(N+1)) log((1 - q**-(N+1)beta) / (1 - q**-2(N+1)))."""
    check_field(q)
    if beta <= 0 or N < 1:
        raise ValueError("beta > 0 and N >= 1 required")
    return (
        2
        * g
        / (N + 1)
        * math.log((1 - q ** (-(N + 1) * beta)) / (1 - q ** (-2 * (N + 1))))
    )


def b_beta(n: int, N: int, beta: float, q: int) -> float:
    """Majorant coefficient b_beta(n) for |n| <= N.

    The full bracketed series: sum over j >= 0 of
    (j+1) [ (q**(-a1 b) - q**(-2 a1))/a1 - (q**(-a2 b) - q**(-2 a2))/a2 ]
    with a1 = |n| + j(N+1) and a2 = (j+2)(N+1) - |n|, summed until the
    increment drops below 1e-14. n = 0 returns the constant term of the
    optimal majorant, which the lower bound carries separately.
    """
    check_field(q)
    if beta <= 0:
        raise ValueError("beta > 0 required")
    n = abs(n)
    if n > N:
        raise ValueError("|n| <= N required")
    if n == 0:
        return -majorant_floor(q, beta, N, 1)  # g = 1 gives the 2/(N+1) factor
    total = 0.0
    j = 0
    while True:
        a1 = n + j * (N + 1)
        a2 = (j + 2) * (N + 1) - n
        term = (j + 1) * (
            (q ** (-a1 * beta) - q ** (-2 * a1)) / a1
            - (q ** (-a2 * beta) - q ** (-2 * a2)) / a2
        )
        total += term
        if abs(term) < B_SERIES_TOL:
            return total
        j += 1
        if j > 100000:
            raise ArithmeticError("majorant coefficient series did not converge")


def lemma_lb_gap(D: Poly, beta: float, t: float, N: int) -> float:
    """log|L(1/2+beta+it)| minus its majorant lower bound (one discriminant).

    Positive-or-bounded-below is the contract; the bound's O(1) slack is what
    the exhaustive scans calibrate.
    """
    L = l_coefficients(D)
    q, g = L.q, L.g
    val = abs(evaluate_shifted(L, beta, t))
    if val < ensemble.ZERO_DENOM_TOL:
        raise ArithmeticError(f"L vanishes numerically at D={D.to_text()}")
    S = power_sums(L, N)
    prime_side = 0j
    for n in range(1, N + 1):
        prime_side += b_beta(n, N, beta, q) * S[n - 1] * cmath.exp(
            -n * (0.5 + 1j * t) * math.log(q)
        )
    bound = majorant_floor(q, beta, N, g) + prime_side.real
    return math.log(val) - bound


def lb_gap_scan(
    q: int,
    g: int,
    betas,
    Ns,
    t: float = 0.0,
    threads: int = 1,
    backend_name: str = "auto",
) -> list[ensemble.EnsembleReport]:
    """Exhaustive minimum of the lower-bound gap over the family, per (beta, N).

    Rows report the minimum gap as the empirical value (prediction 0: the
    bound holds up to O(1), so the gap floor is the experimental output).
    """
    spec = ensemble.EnsembleSpec(q, g)
    backend = get_backend(backend_name)
    tables = ensemble._tables_for(spec, max_d=g)
    reports = []
    for beta in betas:
        for N in Ns:
            bcoef = np.array([b_beta(n, N, beta, q) for n in range(1, N + 1)])
            phase = np.array(
                [cmath.exp(-n * (0.5 + 1j * t) * math.log(q)) for n in range(1, N + 1)]
            )
            floor = majorant_floor(q, beta, N, g)
            u = np.exp(-(0.5 + beta + 1j * t) * math.log(q))

            def chunk_fn(block, idx):
                s, z = pl.prime_data(tables, block, g, backend)
                c = pl.l_coeffs_from_prime_data(q, g, s, z, tables.counts)
                vals = np.abs(pl.horner(c, u))
                ok = vals > ensemble.ZERO_DENOM_TOL
                S = pl.power_sums_from_coeffs(c, g, N)
                prime_side = (S[:, 1:] * (bcoef * phase)).sum(axis=1).real
                gaps = np.log(np.where(ok, vals, 1.0)) - floor - prime_side
                kept = gaps[ok]
                return (
                    float(kept.min()) if kept.size else math.inf,
                    float(kept.sum()),
                    int(ok.sum()),
                    int((~ok).sum()),
                )

            parts = ensemble.map_chunks(spec, chunk_fn, tables, backend, threads)
            min_gap = min(p[0] for p in parts)
            count = sum(p[2] for p in parts)
            mean_gap = math.fsum(p[1] for p in parts) / count
            rep = ensemble.EnsembleReport(
                statistic="lb_gap",
                q=q,
                g=g,
                params={"beta": beta, "N": N, "t": t},
                empirical=min_gap,
                predicted=0.0,
                predicted_error_scale=math.nan,
                n_excluded=sum(p[3] for p in parts),
                mode=spec.mode_label(),
                seed=spec.seed,
                count=count,
                extra={
                    "chunk_size": spec.chunk_size,
                    "beta": beta,
                    "N": N,
                    "t": t,
                    "mean_gap": mean_gap,
                },
            )
            reports.append(rep)
    return reports


@dataclass(frozen=True)
class TrigSumResult:
    lhs: float
    predicted: float
    diff: float


def trig_sum(q: int, g: int, a: float, theta: float) -> TrigSumResult:
    """sum_{n<=g} cos(n theta)/(n q**(a n)) against log min{1/a, min{g, 1/tbar}}."""
    if a <= 0 or g < 1:
        raise ValueError("a > 0 and g >= 1 required")
    lq = math.log(q)
    # exp of the negative exponent underflows to 0 where q**(a n) overflows
    lhs = math.fsum(
        math.cos(n * theta) * math.exp(-a * n * lq) / n for n in range(1, g + 1)
    )
    tb = tbar(theta)
    inner = min(g, 1 / tb) if tb > 0 else g
    predicted = math.log(min(1 / a, inner))
    return TrigSumResult(lhs, predicted, lhs - predicted)


def negmoment_shape(
    q: int, g: int, betas, ts, m: float
) -> tuple[float, list[str]]:
    """Theorem-shaped upper-bound envelope for the negative moment.

    (1/beta)**(k^2 m^2/2) * prod_j min{1/beta_j, 1/tbar_j}**(-m/2)
    * (log g)**(km(km+1)/2); returns the value and the per-factor branch
    ("beta" or "t") taken inside the min.
    """
    if m <= 0:
        raise ValueError("m > 0 required")
    k = len(betas)
    bmin = min(complex(b).real for b in betas)
    if bmin <= 0:
        raise ValueError("shifts need positive real part")
    val = (1 / bmin) ** (k * k * m * m / 2)
    branches = []
    for b, t in zip(betas, ts):
        br = complex(b).real
        tb = tbar(float(t))
        if tb > 0 and 1 / tb < 1 / br:
            branches.append("t")
            val *= (1 / tb) ** (-m / 2)
        else:
            branches.append("beta")
            val *= (1 / br) ** (-m / 2)
    val *= math.log(g) ** (k * m * (k * m + 1) / 2) if g > 1 else 0.0
    return val, branches


def negmoment_scan(
    q: int,
    g_list,
    beta_grid,
    m: float,
    k: int = 1,
    t_list=(0.0,),
    mode: str = "exhaustive",
    count: int = 0,
    seed: int = 0,
    threads: int = 1,
    backend_name: str = "auto",
) -> list[ensemble.EnsembleReport]:
    """Empirical negative moments against the theorem-shaped envelope.

    One row per (g, beta, t); the ratio column (extra "ratio_to_shape") is the
    experimental object, and rows outside the beta >> g**(-1/(2km)) window are
    flagged.
    """
    reports = []
    for g in g_list:
        spec = ensemble.EnsembleSpec(q, g, mode=mode, count=count, seed=seed)
        for beta in beta_grid:
            for t in t_list:
                rep = ensemble.empirical_statistic(
                    spec,
                    "negmoment",
                    {"betas": [beta] * k, "ts": [t] * k, "m": m},
                    threads=threads,
                    backend_name=backend_name,
                )
                rep.extra.update(
                    beta=beta,
                    m=m,
                    k=k,
                    t=t,
                    branch=rep.extra.get("shape_branches", ""),
                    window_ok=beta >= g ** (-1 / (2 * k * m)),
                )
                reports.append(rep)
    return reports
