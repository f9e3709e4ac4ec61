"""Command-line driver: every statistic and verification suite, reproducibly.

Subcommands: primes, lpoly, verify, ratios, twisted, density, negmom,
boundslab. Global flags configure the ensemble (q, g, mode, seed, threads,
truncation tolerance) and the report sink (csv/json, path). A config file of
`key = value` lines can hold the same settings; command-line flags win.

Exit status: 0 success / all thresholds met, 1 precondition or compute error,
2 usage error, 3 threshold breach (for CI gates).

Timing note: wall-clock runtime is only written into CSV when --timing is
given, so that identical configurations produce byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

from . import boundslab, checks, ensemble
from .lfun import l_coefficients, verify_functional_equation, zeros
from .polyfq import Poly, check_field, prime_count, prime_polys

DEFAULTS = {
    "q": 5,
    "g": 3,
    "mode": "exhaustive",
    "seed": 0,
    "threads": 1,
    "trunc_tol": 1e-10,
    "format": "csv",
    "out": None,
    "timing": False,
    "kernels": "auto",
}


@dataclass
class RunConfig:
    q: int
    g: int
    mode: str
    count: int
    seed: int
    threads: int
    trunc_tol: float
    format: str
    out: str | None
    timing: bool
    kernels: str

    def spec(self) -> ensemble.EnsembleSpec:
        return ensemble.EnsembleSpec(
            self.q, self.g, mode=self.mode, count=self.count, seed=self.seed
        )


def parse_shifts(text: str) -> list[complex]:
    """Comma-separated shift literals: '0.1', '-0.05', '0.1+0.2i', '0.3i'."""
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        if not tok:
            continue
        out.append(complex(tok.replace("i", "j")))
    return out


def _parse_mode(text: str) -> tuple[str, int]:
    if text == "exhaustive":
        return "exhaustive", 0
    if text.startswith("sample:"):
        return "sampled", int(text.split(":", 1)[1])
    raise ValueError(f"mode must be 'exhaustive' or 'sample:<count>', got {text!r}")


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {line!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _build_config(args) -> RunConfig:
    merged = dict(DEFAULTS)
    if args.config:
        raw = _read_config_file(args.config)
        unknown = set(raw) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for k, v in raw.items():
            if k in ("q", "g", "seed", "threads"):
                merged[k] = int(v)
            elif k == "trunc_tol":
                merged[k] = float(v)
            elif k == "timing":
                merged[k] = v.lower() in ("1", "true", "yes")
            else:
                merged[k] = v
    for k in DEFAULTS:
        flag = getattr(args, k, None)
        if flag is not None:
            merged[k] = flag
    mode, count = _parse_mode(merged["mode"])
    check_field(merged["q"])
    if merged["format"] not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    return RunConfig(
        q=merged["q"],
        g=merged["g"],
        mode=mode,
        count=count,
        seed=merged["seed"],
        threads=merged["threads"],
        trunc_tol=merged["trunc_tol"],
        format=merged["format"],
        out=merged["out"],
        timing=bool(merged["timing"]),
        kernels=merged["kernels"],
    )


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_reports(cfg: RunConfig, reports, extra_columns=()) -> None:
    if cfg.format == "csv":
        lines = ensemble.report_csv_rows(
            reports, extra_columns=extra_columns, include_timing=cfg.timing
        )
        _emit(cfg, "\n".join(lines))
    else:
        _emit(cfg, ensemble.report_json(reports, include_timing=cfg.timing))


# -- subcommands ---------------------------------------------------------------


def _cmd_primes(cfg: RunConfig, args) -> int:
    rows = ["d,count,listed"]
    for d in range(1, args.max_d + 1):
        listed = len(prime_polys(cfg.q, d)) if d <= args.list_to else 0
        rows.append(f"{d},{prime_count(cfg.q, d)},{listed}")
    if cfg.format == "json":
        data = [
            {"d": d, "count": prime_count(cfg.q, d)} for d in range(1, args.max_d + 1)
        ]
        _emit(cfg, json.dumps(data, indent=2))
    else:
        _emit(cfg, "\n".join(rows))
    return 0


def _cmd_lpoly(cfg: RunConfig, args) -> int:
    D = Poly.parse(cfg.q, args.D)
    L = l_coefficients(D)
    zs = zeros(L)
    fe = verify_functional_equation(L)
    if cfg.format == "json":
        _emit(
            cfg,
            json.dumps(
                {
                    "q": L.q,
                    "g": L.g,
                    "D": D.to_text(),
                    "coefficients": list(L.c),
                    "fe_residual": fe,
                    "radii_residual": zs.radii_residual,
                    "thetas": list(zs.thetas),
                },
                indent=2,
            ),
        )
    else:
        lines = [L.to_csv_row()]
        lines.append(f"fe_residual,{fe}")
        lines.append(f"radii_residual,{zs.radii_residual!r}")
        lines.extend(f"theta_{j},{t!r}" for j, t in enumerate(zs.thetas))
        _emit(cfg, "\n".join(lines))
    return 0


def _cmd_verify(cfg: RunConfig, args) -> int:
    names = [n.strip() for n in args.checks.split(",") if n.strip()]
    rows = checks.run_checks(
        names, cfg.q, cfg.g, threads=cfg.threads, backend_name=cfg.kernels
    )
    lines = ["check,q,g,params,observed,threshold,passed"]
    for r in rows:
        lines.append(
            f"{r.check},{r.q},{r.g},{r.params},{r.observed!r},{r.threshold!r},{int(r.passed)}"
        )
    if cfg.format == "json":
        _emit(cfg, json.dumps([r.__dict__ for r in rows], indent=2))
    else:
        _emit(cfg, "\n".join(lines))
    return 0 if all(r.passed for r in rows) else 3


def _cmd_ratios(cfg: RunConfig, args) -> int:
    rep = ensemble.empirical_statistic(
        cfg.spec(),
        "ratio",
        {"alphas": parse_shifts(args.alpha), "betas": parse_shifts(args.beta)},
        threads=cfg.threads,
        trunc_tol=cfg.trunc_tol,
        backend_name=cfg.kernels,
    )
    _emit_reports(cfg, [rep])
    return 0


def _cmd_twisted(cfg: RunConfig, args) -> int:
    rep = ensemble.empirical_statistic(
        cfg.spec(),
        "twisted",
        {"alphas": parse_shifts(args.alpha), "h": Poly.parse(cfg.q, args.h)},
        threads=cfg.threads,
        trunc_tol=cfg.trunc_tol,
        backend_name=cfg.kernels,
    )
    _emit_reports(cfg, [rep])
    return 0


def _cmd_density(cfg: RunConfig, args) -> int:
    phihat = _read_phihat(args.phihat)
    rep = ensemble.empirical_statistic(
        cfg.spec(),
        "density",
        {"phihat": phihat, "N": args.N},
        threads=cfg.threads,
        trunc_tol=cfg.trunc_tol,
        backend_name=cfg.kernels,
    )
    _emit_reports(cfg, [rep])
    return 0


def _read_phihat(path: str) -> list[float]:
    """Two-column CSV (n, value): samples of the transform at n/(2g)."""
    samples: dict[int, float] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.lower().startswith("n,"):
                continue
            n_txt, val_txt = line.split(",")[:2]
            samples[int(n_txt)] = float(val_txt)
    if samples and min(samples) != 0:
        raise ValueError("phihat samples must start at n = 0")
    return [samples.get(n, 0.0) for n in range(max(samples) + 1)] if samples else [0.0]


def _cmd_negmom(cfg: RunConfig, args) -> int:
    betas = parse_shifts(args.beta)
    ts = [float(t) for t in args.t.split(",")] if args.t else [0.0] * len(betas)
    rep = ensemble.empirical_statistic(
        cfg.spec(),
        "negmoment",
        {"betas": betas, "ts": ts, "m": args.m},
        threads=cfg.threads,
        trunc_tol=cfg.trunc_tol,
        backend_name=cfg.kernels,
    )
    _emit_reports(cfg, [rep], extra_columns=("ratio_to_shape", "shape_branches"))
    return 0


def _cmd_boundslab(cfg: RunConfig, args) -> int:
    if args.suite == "trig":
        lines = ["q,g,a,theta,lhs,predicted,diff"]
        worst = 0.0
        for qq in (5, 13):
            for a in (1e-3, 1e-2, 1e-1, 1.0):
                for theta in (0.0, 0.01, 0.1, 1.0, 3.0):
                    for gg in (10, 100, 10**4):
                        r = boundslab.trig_sum(qq, gg, a, theta)
                        worst = max(worst, abs(r.diff))
                        lines.append(
                            f"{qq},{gg},{a!r},{theta!r},{r.lhs!r},{r.predicted!r},{r.diff!r}"
                        )
        _emit(cfg, "\n".join(lines))
        return 0 if worst <= 3.0 else 3
    if args.suite == "lb":
        betas = [float(b) for b in args.beta.split(",")] if args.beta else [0.1, 0.3]
        Ns = (
            [int(n) for n in args.N_list.split(",")]
            if args.N_list
            else [2, 4, 2 * cfg.g]
        )
        reports = boundslab.lb_gap_scan(
            cfg.q, cfg.g, betas, Ns, threads=cfg.threads, backend_name=cfg.kernels
        )
        _emit_reports(cfg, reports, extra_columns=("beta", "N", "t", "mean_gap"))
        return 0
    if args.suite == "scan":
        g_list = [int(x) for x in args.g_list.split(",")] if args.g_list else [2, 3, 4]
        betas = [float(b) for b in args.beta.split(",")] if args.beta else [0.2, 0.3, 0.4]
        ts = [float(t) for t in args.t.split(",")] if args.t else [0.0]
        reports = boundslab.negmoment_scan(
            cfg.q,
            g_list,
            betas,
            args.m,
            k=args.k,
            t_list=ts,
            mode=cfg.mode,
            count=cfg.count,
            seed=cfg.seed,
            threads=cfg.threads,
            backend_name=cfg.kernels,
        )
        _emit_reports(
            cfg,
            reports,
            extra_columns=("beta", "m", "k", "t", "branch", "ratio_to_shape", "window_ok"),
        )
        return 0
    raise ValueError(f"unknown suite {args.suite!r}")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="quadlf",
        description="Quadratic Dirichlet L-functions over F_q[x]: ensemble statistics vs. predicted main terms.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, help="field size (prime, 1 mod 4)")
    common.add_argument("--g", type=int, help="genus: family degree is 2g+1")
    common.add_argument("--mode", help="exhaustive | sample:<count>")
    common.add_argument("--seed", type=int, help="sampling seed")
    common.add_argument("--threads", type=int, help="worker threads")
    common.add_argument("--trunc-tol", dest="trunc_tol", type=float, help="Euler product tail tolerance")
    common.add_argument("--format", choices=("csv", "json"), help="report format")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--config", help="key=value config file, flags win")
    common.add_argument("--timing", action="store_true", default=None, help="include wall-clock runtime in CSV")
    common.add_argument("--kernels", choices=("auto", "compiled", "pure"), help="kernel backend")

    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("primes", parents=[common], help="prime-count table")
    p.add_argument("--max-d", type=int, default=10)
    p.add_argument("--list-to", type=int, default=6, help="degrees to actually enumerate")
    p.set_defaults(fn=_cmd_primes)

    p = sub.add_parser("lpoly", parents=[common], help="L-polynomial of one discriminant")
    p.add_argument("--D", required=True, help="polynomial literal ('c0,c1,...' or 'x^5+..')")
    p.set_defaults(fn=_cmd_lpoly)

    p = sub.add_parser("verify", parents=[common], help="identity suites")
    p.add_argument("--checks", default="fe,rh,explicit,gauss,l1,l3,l5")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("ratios", parents=[common], help="ratio statistic vs prediction")
    p.add_argument("--alpha", required=True, help="numerator shifts, comma-separated")
    p.add_argument("--beta", required=True, help="denominator shifts, comma-separated")
    p.set_defaults(fn=_cmd_ratios)

    p = sub.add_parser("twisted", parents=[common], help="twisted moment vs prediction")
    p.add_argument("--alpha", required=True)
    p.add_argument("--h", required=True, help="monic twist polynomial literal")
    p.set_defaults(fn=_cmd_twisted)

    p = sub.add_parser("density", parents=[common], help="one-level density vs prediction")
    p.add_argument("--phihat", required=True, help="CSV of (n, transform sample at n/(2g))")
    p.add_argument("--N", type=int, required=True, help="test-function support bound")
    p.set_defaults(fn=_cmd_density)

    p = sub.add_parser("negmom", parents=[common], help="negative moment vs envelope")
    p.add_argument("--beta", required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--t", default="", help="imaginary offsets, comma-separated")
    p.set_defaults(fn=_cmd_negmom)

    p = sub.add_parser("boundslab", parents=[common], help="lower-bound machinery suites")
    p.add_argument("--suite", choices=("trig", "lb", "scan"), required=True)
    p.add_argument("--beta", default="", help="beta grid for lb/scan")
    p.add_argument("--N-list", dest="N_list", default="", help="majorant degrees for lb")
    p.add_argument("--g-list", dest="g_list", default="", help="genus grid for scan")
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--t", default="")
    p.set_defaults(fn=_cmd_boundslab)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        cfg = _build_config(args)
        return args.fn(cfg, args)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
