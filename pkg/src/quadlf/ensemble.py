"""Ensemble statistics over the square-free family of odd degree 2g+1.

Enumeration is deterministic: exhaustive mode walks the canonical monic index
order and sieves square-free members; sampled mode draws indices from a fixed
PCG64 stream (numpy's documented, portable generator) and rejects
non-square-free candidates, so a (seed, count) pair always yields the same
multiset. Averages are reduced chunk by chunk with exact Shewchuk summation
(math.fsum), within chunks in index order and across chunks in chunk order,
which makes every report bit-stable across worker-thread counts.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import mainterms
from .kernels import get_backend
from .kernels import pipeline as pl
from .kernels.tables import build_tables
from .polyfq import Poly, check_field, factor

EXHAUSTIVE_BUDGET = 2 * 10**8
ZERO_DENOM_TOL = 1e-14


def family_size(q: int, g: int) -> int:
    """#H_{2g+1} = q**(2g+1) - q**(2g)."""
    check_field(q)
    return q ** (2 * g + 1) - q ** (2 * g)


@dataclass(frozen=True)
class EnsembleSpec:
    q: int
    g: int
    mode: str = "exhaustive"  # "exhaustive" | "sampled"
    count: int = 0  # sample size in sampled mode
    seed: int = 0
    chunk_size: int = 16384

    def __post_init__(self):
        check_field(self.q)
        if self.g < 1:
            raise ValueError("g >= 1 required")
        if self.mode not in ("exhaustive", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "sampled" and self.count < 1:
            raise ValueError("sampled mode needs count >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size >= 1 required")

    @property
    def degree(self) -> int:
        return 2 * self.g + 1

    @property
    def n_monic(self) -> int:
        return self.q**self.degree

    def mode_label(self) -> str:
        return "exhaustive" if self.mode == "exhaustive" else f"sample:{self.count}"


# -- enumeration -------------------------------------------------------------


def _tables_for(spec: EnsembleSpec, max_d: int):
    return build_tables(spec.q, spec.degree + 1, max_d, sq_max_d=spec.g)


def _sampled_indices(spec: EnsembleSpec, tables, backend) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    total = spec.n_monic
    taken: list[np.ndarray] = []
    have = 0
    while have < spec.count:
        want = spec.count - have
        draw = rng.integers(0, total, size=want + want // 3 + 64)
        block = np.empty((draw.size, spec.degree + 1), dtype=np.uint8)
        for j in range(spec.degree):
            block[:, j] = (draw // spec.q**j) % spec.q
        block[:, spec.degree] = 1
        keep = draw[pl.squarefree_mask(tables, block, backend)][:want]
        taken.append(keep)
        have += keep.size
    return np.concatenate(taken)


def iterate_H(spec: EnsembleSpec, backend_name: str = "auto"):
    """Stream the family members as Poly, in the deterministic order."""
    if spec.mode == "exhaustive" and spec.n_monic > EXHAUSTIVE_BUDGET:
        raise ValueError(
            f"exhaustive enumeration of {spec.n_monic} monic polynomials "
            "exceeds the budget; use sampled mode"
        )
    backend = get_backend(backend_name)
    tables = _tables_for(spec, max_d=1)
    q, n = spec.q, spec.degree
    if spec.mode == "exhaustive":
        for lo in range(0, spec.n_monic, spec.chunk_size):
            hi = min(lo + spec.chunk_size, spec.n_monic)
            block = pl.monic_block(q, n, lo, hi)
            mask = pl.squarefree_mask(tables, block, backend)
            for row in block[mask]:
                yield Poly(q, row.tolist())
    else:
        for idx in _sampled_indices(spec, tables, backend):
            yield Poly.monic_from_index(q, n, int(idx))


# -- chunked deterministic reduction ------------------------------------------


def _fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real.tolist()), math.fsum(values.imag.tolist()))


def map_chunks(
    spec: EnsembleSpec,
    chunk_fn: Callable[[np.ndarray, np.ndarray], object],
    tables,
    backend,
    threads: int = 1,
) -> list:
    """Apply chunk_fn to each chunk's square-free (block, indices), in order.

    Chunks may be processed by any number of worker threads; results are
    collected in chunk order, so downstream reductions are deterministic.
    """
    q, n = spec.q, spec.degree

    if spec.mode == "exhaustive":
        if spec.n_monic > EXHAUSTIVE_BUDGET:
            raise ValueError("exhaustive mode exceeds the enumeration budget")

        def chunk_job(rng_pair):
            lo, hi = rng_pair
            block = pl.monic_block(q, n, lo, hi)
            idx = np.arange(lo, hi, dtype=np.int64)
            mask = pl.squarefree_mask(tables, block, backend)
            return chunk_fn(block[mask], idx[mask])

        jobs = [
            (lo, min(lo + spec.chunk_size, spec.n_monic))
            for lo in range(0, spec.n_monic, spec.chunk_size)
        ]
    else:
        all_idx = _sampled_indices(spec, tables, backend)

        def chunk_job(part):
            block = np.empty((part.size, n + 1), dtype=np.uint8)
            for j in range(n):
                block[:, j] = (part // q**j) % q
            block[:, n] = 1
            return chunk_fn(block, part)

        jobs = [
            all_idx[lo : lo + spec.chunk_size]
            for lo in range(0, all_idx.size, spec.chunk_size)
        ]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(chunk_job, jobs))
    return [chunk_job(j) for j in jobs]


def _run_chunks(
    spec: EnsembleSpec,
    values_fn: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray | None]],
    tables,
    backend,
    threads: int = 1,
) -> tuple[list[complex], int, int, list[int]]:
    """Chunked mean of one or more per-D columns.

    values_fn(block, idx) gets the square-free coefficient rows of one chunk
    (with their monic indices) and returns (values, excluded_mask); values may
    be (m,) or (m, ncols). Exclusions are dropped from every column. Returns
    (column means, count, n_excluded, first excluded indices).
    """
    results = map_chunks(
        spec,
        lambda block, idx: _chunk_values(values_fn, block, idx),
        tables,
        backend,
        threads,
    )
    ncols = max(len(r[0]) for r in results)
    sums = [
        complex(
            math.fsum(r[0][c].real for r in results),
            math.fsum(r[0][c].imag for r in results),
        )
        for c in range(ncols)
    ]
    count = sum(r[1] for r in results)
    n_excl = sum(r[2] for r in results)
    excl: list[int] = []
    for r in results:
        excl.extend(r[3][: max(0, 16 - len(excl))])
    if count == 0:
        raise ArithmeticError("no family members survived exclusion")
    return [s / count for s in sums], count, n_excl, excl


def _chunk_values(values_fn, block, idx):
    vals, excl_mask = values_fn(block, idx)
    vals = np.atleast_2d(np.asarray(vals, dtype=np.complex128).T).T
    if excl_mask is not None and excl_mask.any():
        keep = ~excl_mask
        excl_idx = idx[excl_mask][:16].tolist()
        vals = vals[keep]
        n_excl = int(excl_mask.sum())
    else:
        excl_idx = []
        n_excl = 0
    col_sums = [_fsum_complex(vals[:, c]) for c in range(vals.shape[1])]
    return col_sums, vals.shape[0], n_excl, excl_idx


def average(spec: EnsembleSpec, functional, threads: int = 1, backend_name: str = "auto") -> complex:
    """Mean of a pure per-D functional over the family (deterministic).

    The functional receives a Poly; any exception aborts the run naming the
    offending D.
    """
    backend = get_backend(backend_name)
    tables = _tables_for(spec, max_d=1)

    def values_fn(block, idx):
        out = np.empty(block.shape[0], dtype=np.complex128)
        for i, row in enumerate(block):
            D = Poly(spec.q, row.tolist())
            try:
                out[i] = functional(D)
            except Exception as exc:
                raise RuntimeError(f"functional failed on D = {D.to_text()}") from exc
        return out, None

    means, _, _, _ = _run_chunks(spec, values_fn, tables, backend, threads)
    return means[0]


# -- reports -------------------------------------------------------------------


@dataclass
class EnsembleReport:
    statistic: str
    q: int
    g: int
    params: dict
    empirical: complex
    predicted: complex
    predicted_error_scale: float
    n_excluded: int
    mode: str
    seed: int
    count: int
    runtime_s: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def abs_err(self) -> float:
        return abs(self.empirical - self.predicted)

    @property
    def rel_err(self) -> float:
        return self.abs_err / max(abs(self.predicted), 1e-300)

    def params_text(self) -> str:
        parts = []
        for k in sorted(self.params):
            v = self.params[k]
            if isinstance(v, Poly):
                v = v.to_text()
            elif isinstance(v, (list, tuple)):
                v = "|".join(_num_text(x) for x in v)
            elif isinstance(v, (int, float, complex)):
                v = _num_text(v)
            parts.append(f"{k}={v}")
        return ";".join(parts)


def _num_text(x) -> str:
    if isinstance(x, complex):
        if x.imag == 0:
            return repr(x.real)
        return f"{x.real!r}{'+' if x.imag >= 0 else '-'}{abs(x.imag)!r}i"
    return repr(x)


CSV_COLUMNS = [
    "statistic",
    "q",
    "g",
    "params",
    "empirical_re",
    "empirical_im",
    "predicted_re",
    "predicted_im",
    "abs_err",
    "rel_err",
    "predicted_error_scale",
    "n_excluded",
    "mode",
    "seed",
    "runtime_s",
]


def report_csv_rows(
    reports: Sequence[EnsembleReport],
    extra_columns: Sequence[str] = (),
    include_timing: bool = False,
) -> list[str]:
    header = CSV_COLUMNS + list(extra_columns)
    lines = [",".join(header)]
    for r in reports:
        row = [
            r.statistic,
            str(r.q),
            str(r.g),
            r.params_text(),
            repr(r.empirical.real),
            repr(r.empirical.imag),
            repr(r.predicted.real),
            repr(r.predicted.imag),
            repr(r.abs_err),
            repr(r.rel_err),
            repr(r.predicted_error_scale),
            str(r.n_excluded),
            r.mode,
            str(r.seed),
            repr(r.runtime_s) if include_timing and r.runtime_s is not None else "",
        ]
        row += [_cell_text(r.extra.get(c, "")) for c in extra_columns]
        lines.append(",".join(row))
    return lines


def _cell_text(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def report_json(reports: Sequence[EnsembleReport], include_timing: bool = True) -> str:
    out = []
    for r in reports:
        d = {
            "statistic": r.statistic,
            "q": r.q,
            "g": r.g,
            "params": r.params_text(),
            "empirical_re": r.empirical.real,
            "empirical_im": r.empirical.imag,
            "predicted_re": r.predicted.real,
            "predicted_im": r.predicted.imag,
            "abs_err": r.abs_err,
            "rel_err": r.rel_err,
            "predicted_error_scale": r.predicted_error_scale,
            "n_excluded": r.n_excluded,
            "mode": r.mode,
            "seed": r.seed,
            "runtime_s": r.runtime_s if include_timing else None,
        }
        d.update({k: v for k, v in r.extra.items() if not k.startswith("_")})
        out.append(d)
    return json.dumps(out, indent=2, sort_keys=True, default=str)


# -- statistics ----------------------------------------------------------------


def _shift_u(q: int, gamma: complex, t: float = 0.0) -> complex:
    return np.exp(-(0.5 + complex(gamma) + 1j * t) * math.log(q))


def empirical_statistic(
    spec: EnsembleSpec,
    kind: str,
    params: dict,
    threads: int = 1,
    trunc_tol: float = 1e-10,
    backend_name: str = "auto",
) -> EnsembleReport:
    """Pair an empirical ensemble average with its predicted value."""
    t0 = time.perf_counter()
    handlers = {
        "ratio": _stat_ratio,
        "twisted": _stat_twisted,
        "negmoment": _stat_negmoment,
        "density": _stat_density,
        "chi_square_avg": _stat_chi_square,
    }
    if kind not in handlers:
        raise ValueError(f"unknown statistic kind {kind!r}")
    backend = get_backend(backend_name)
    report = handlers[kind](spec, dict(params), threads, trunc_tol, backend)
    report.runtime_s = time.perf_counter() - t0
    return report


def _base_report(spec, kind, params, means, count, n_excl, excl) -> EnsembleReport:
    # the params column is the re-run contract; chunking affects float bits
    params = dict(params, chunk=spec.chunk_size)
    return EnsembleReport(
        statistic=kind,
        q=spec.q,
        g=spec.g,
        params=params,
        empirical=means[0],
        predicted=0.0,
        predicted_error_scale=math.nan,
        n_excluded=n_excl,
        mode=spec.mode_label(),
        seed=spec.seed,
        count=count,
        extra={"chunk_size": spec.chunk_size},
    )


def _stat_ratio(spec, params, threads, tol, backend) -> EnsembleReport:
    alphas = [complex(a) for a in params["alphas"]]
    betas = [complex(b) for b in params["betas"]]
    q, g = spec.q, spec.g
    tables = _tables_for(spec, max_d=g)
    u_num = [_shift_u(q, a) for a in alphas]
    u_den = [_shift_u(q, b) for b in betas]

    def values_fn(block, idx):
        s, z = pl.prime_data(tables, block, g, backend)
        c = pl.l_coeffs_from_prime_data(q, g, s, z, tables.counts)
        num = np.ones(block.shape[0], dtype=np.complex128)
        for u in u_num:
            num *= pl.horner(c, u)
        den = np.ones(block.shape[0], dtype=np.complex128)
        den_min = np.full(block.shape[0], np.inf)
        for u in u_den:
            ev = pl.horner(c, u)
            den *= ev
            den_min = np.minimum(den_min, np.abs(ev))
        excl = den_min < ZERO_DENOM_TOL
        safe = np.where(excl, 1.0, den)
        return num / safe, excl

    means, count, n_excl, excl = _run_chunks(spec, values_fn, tables, backend, threads)
    rep = _base_report(spec, "ratio", dict(params, tol=tol), means, count, n_excl, excl)
    pred, trunc = mainterms.ratios_main(q, g, alphas, betas, tol)
    rep.predicted = pred
    rep.predicted_error_scale = _ratio_error_scale(q, g, alphas, betas)
    rep.extra.update(trunc_tail=trunc.tail_estimate, trunc_degree=trunc.max_prime_degree)
    if excl:
        rep.extra["excluded_indices"] = excl
    return rep


def _ratio_error_scale(q, g, alphas, betas) -> float:
    """Theorem-shaped error scale E_k (epsilon terms dropped)."""
    k = len(alphas)
    al = max(abs(a.real) for a in alphas)
    be = min(b.real for b in betas)
    if k == 1:
        expo = be * (3 + 2 * al) if alphas[0].real >= 0 else be * (3 - 4 * al)
        return q ** (-g * expo)
    if k == 2:
        return q ** (-g * be * min((1 - 4 * al) / (1 + be), (1 - 2 * al) / (2 + be)))
    if k == 3:
        return q ** (-g * be * min((0.25 - 4 * al) / be, (0.5 - 4 * al) / (3 + be)))
    return math.nan


def _stat_twisted(spec, params, threads, tol, backend) -> EnsembleReport:
    alphas = [complex(a) for a in params["alphas"]]
    h = params["h"]
    if not isinstance(h, Poly):
        h = Poly.parse(spec.q, str(h))
    q, g = spec.q, spec.g
    tables = _tables_for(spec, max_d=g)
    u_num = [_shift_u(q, a) for a in alphas]

    def values_fn(block, idx):
        s, z = pl.prime_data(tables, block, g, backend)
        c = pl.l_coeffs_from_prime_data(q, g, s, z, tables.counts)
        vals = pl.chi_fixed_twist(block, h, backend).astype(np.complex128)
        for u in u_num:
            vals *= pl.horner(c, u)
        return vals, None

    means, count, n_excl, excl = _run_chunks(spec, values_fn, tables, backend, threads)
    params = dict(params, h=h, tol=tol)
    rep = _base_report(spec, "twisted", params, means, count, n_excl, excl)
    twist = mainterms.TwistPoly.from_poly(h)
    pred, trunc = mainterms.twisted_main(q, g, alphas, twist, tol)
    rep.predicted = pred
    rep.predicted_error_scale = _twisted_error_scale(q, g, alphas, twist)
    rep.extra.update(trunc_tail=trunc.tail_estimate, trunc_degree=trunc.max_prime_degree)
    return rep


def _twisted_error_scale(q, g, alphas, twist) -> float:
    k = len(alphas)
    al = max(abs(a.real) for a in alphas)
    hn = twist.h.norm() if twist.h.degree() >= 1 else 1
    h1n = twist.h1.norm() if twist.h1.degree() >= 1 else 1
    if k == 1:
        return math.sqrt(hn) * q ** (-(1.5 - al) * g) + h1n**0.25 * q ** (
            -(1.5 - 2 * al) * g
        )
    if k == 2:
        return math.sqrt(hn) * q ** (-(1 - 2 * al) * g) + q ** (-(1 - 4 * al) * g)
    if k == 3:
        return (
            math.sqrt(hn) * q ** (-(0.5 - 4 * al) * g)
            + q ** (-(1 - 6 * al) * g)
            + h1n**-0.75 * q ** (-(0.25 - 4 * al) * g)
        )
    return math.nan


def _stat_negmoment(spec, params, threads, tol, backend) -> EnsembleReport:
    betas = [complex(b) for b in params["betas"]]
    ts = [float(t) for t in params.get("ts", [0.0] * len(betas))]
    m = float(params["m"])
    if len(ts) != len(betas):
        raise ValueError("ts must match betas in length")
    q, g = spec.q, spec.g
    tables = _tables_for(spec, max_d=g)
    u_den = [_shift_u(q, b, t) for b, t in zip(betas, ts)]

    def values_fn(block, idx):
        s, z = pl.prime_data(tables, block, g, backend)
        c = pl.l_coeffs_from_prime_data(q, g, s, z, tables.counts)
        vals = np.ones(block.shape[0], dtype=np.complex128)
        den_min = np.full(block.shape[0], np.inf)
        for u in u_den:
            ev = np.abs(pl.horner(c, u))
            den_min = np.minimum(den_min, ev)
            vals *= np.where(ev < ZERO_DENOM_TOL, 1.0, ev) ** (-m)
        return vals, den_min < ZERO_DENOM_TOL

    means, count, n_excl, excl = _run_chunks(spec, values_fn, tables, backend, threads)
    rep = _base_report(spec, "negmoment", params, means, count, n_excl, excl)
    from .boundslab import negmoment_shape

    shape, branches = negmoment_shape(q, g, betas, ts, m)
    rep.predicted = shape
    rep.extra["shape_branches"] = "|".join(branches)
    rep.extra["ratio_to_shape"] = (
        abs(means[0]) / shape if shape > 0 else math.inf
    )
    if excl:
        rep.extra["excluded_indices"] = excl
    return rep


def _stat_density(spec, params, threads, tol, backend) -> EnsembleReport:
    phihat = [float(v) for v in params["phihat"]]
    N = int(params["N"])
    q, g = spec.q, spec.g
    if len(phihat) < N + 1:
        phihat = phihat + [0.0] * (N + 1 - len(phihat))
    # trig-polynomial coefficients of the matching test function
    fh = [phihat[n] / (2 * g) for n in range(N + 1)]
    tables = _tables_for(spec, max_d=g)
    qpow = np.array([q ** (-n / 2) for n in range(1, N + 1)])
    weights = np.array(fh[1:])

    def values_fn(block, idx):
        s, z = pl.prime_data(tables, block, g, backend)
        c = pl.l_coeffs_from_prime_data(q, g, s, z, tables.counts)
        theta, _resid = pl.zero_angles(c, q, g)
        vals_zero = np.full(theta.shape[0], 2 * g * fh[0])
        for n in range(1, N + 1):
            vals_zero += 2 * fh[n] * np.cos(2 * np.pi * n * theta).sum(axis=1)
        S = pl.power_sums_from_coeffs(c, g, N)
        vals_exp = 2 * g * fh[0] - 2 * (S[:, 1:] * (weights * qpow)).sum(axis=1)
        return np.stack([vals_zero, vals_exp], axis=1), None

    means, count, n_excl, excl = _run_chunks(spec, values_fn, tables, backend, threads)
    rep = _base_report(spec, "density", params, means, count, n_excl, excl)
    pred, warn = mainterms.density_main(q, g, phihat, N)
    rep.predicted = pred
    rep.predicted_error_scale = q ** (N / 2 - 2 * g)
    rep.extra["empirical_explicit_route"] = means[1].real
    rep.extra["route_delta"] = abs(means[0] - means[1])
    if warn:
        rep.extra["support_warning"] = f"N={N} outside validity window N < 4g"
    return rep


def _stat_chi_square(spec, params, threads, tol, backend) -> EnsembleReport:
    f = params["f"]
    if not isinstance(f, Poly):
        f = Poly.parse(spec.q, str(f))
    q, g = spec.q, spec.g
    tables = _tables_for(spec, max_d=1)

    def values_fn(block, idx):
        return pl.chi_fixed_twist(block, f * f, backend).astype(np.complex128), None

    means, count, n_excl, excl = _run_chunks(spec, values_fn, tables, backend, threads)
    params = dict(params, f=f)
    rep = _base_report(spec, "chi_square_avg", params, means, count, n_excl, excl)
    pred = 1.0
    for p, _e in factor(f).factors:
        pred /= 1 + 1 / p.norm()
    rep.predicted = pred
    rep.predicted_error_scale = q ** (-2 * g)
    return rep
