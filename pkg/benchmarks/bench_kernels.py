#!/usr/bin/env python3
"""Benchmark the compiled kernel against the numpy fallback.

Times the two hot kernels (square-free sieve, prime-symbol sums) and one
end-to-end statistic on a mid-size ensemble, then prints a table with the
speedup. Results are checked equal between backends before timing is trusted.

Usage: python benchmarks/bench_kernels.py [--q 5] [--g 3] [--repeat 3]
"""

import argparse
import time

import numpy as np

from quadlf.ensemble import EnsembleSpec, empirical_statistic
from quadlf.kernels import HAVE_COMPILED, get_backend
from quadlf.kernels import pipeline as pl
from quadlf.kernels.tables import build_tables


def best_of(repeat, fn):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=int, default=5)
    ap.add_argument("--g", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    q, g = args.q, args.g

    if not HAVE_COMPILED:
        print("compiled kernels not built; only the pure backend is available")

    n = 2 * g + 1
    tables = build_tables(q, n + 1, g, sq_max_d=g)
    block = pl.monic_block(q, n, 0, min(q**n, 200_000))
    print(f"q={q} g={g}: block of {block.shape[0]} candidates, primes to degree {g}")

    rows = []
    results = {}
    for name in ["pure"] + (["compiled"] if HAVE_COMPILED else []):
        be = get_backend(name)
        t_sieve, mask = best_of(
            args.repeat, lambda be=be: pl.squarefree_mask(tables, block, be)
        )
        sq = block[mask]
        t_sums, sz = best_of(
            args.repeat, lambda be=be: pl.prime_data(tables, sq, g, be)
        )
        results[name] = (mask, sz)
        rows.append((name, t_sieve, t_sums))

    if HAVE_COMPILED:
        m0, (s0, z0) = results["pure"]
        m1, (s1, z1) = results["compiled"]
        assert (m0 == m1).all() and (s0 == s1).all() and (z0 == z1).all(), (
            "backend mismatch"
        )
        print("backend results identical: ok")

    print(f"\n{'backend':<10} {'sieve (s)':>12} {'symbol sums (s)':>17}")
    for name, t1, t2 in rows:
        print(f"{name:<10} {t1:>12.3f} {t2:>17.3f}")
    if len(rows) == 2:
        print(
            f"{'speedup':<10} {rows[0][1] / rows[1][1]:>11.1f}x "
            f"{rows[0][2] / rows[1][2]:>16.1f}x"
        )

    print("\nend-to-end ratio statistic (exhaustive):")
    spec = EnsembleSpec(q, min(g, 3))
    for name in ["pure"] + (["compiled"] if HAVE_COMPILED else []):
        t0 = time.perf_counter()
        rep = empirical_statistic(
            spec, "ratio", {"alphas": [0.1], "betas": [0.3]}, backend_name=name
        )
        dt = time.perf_counter() - t0
        print(f"  {name:<10} {dt:7.2f}s rel_err={rep.rel_err:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
