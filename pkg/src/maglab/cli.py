"""Command-line front end: ``maglab {sample,moments,regime,verify,sweep}``."""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from pathlib import Path

from . import experiments, moments
from .asymptotics import Case, classify_regime
from .model import MagParams, ParameterError
from .sampler import isolation_census, sample_graph, write_attributes, write_edge_list
from .serialize import dumps

DEFAULT_SEED = 7
EXIT_FAILED_CHECK = 1
EXIT_INVALID = 2
EXIT_BOUNDARY = 3


def _default_seed() -> int:
    env = os.environ.get("MAGLAB_SEED")
    return int(env) if env else DEFAULT_SEED


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected q11,q10,q00")
    return tuple(float(p) for p in parts)


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p]


def _n_list(text: str) -> list[int]:
    """``a,b,c`` or ``lo..hi`` (doubling from lo while <= hi)."""
    if ".." in text:
        lo, hi = (int(p) for p in text.split(".."))
        if lo < 2 or hi < lo:
            raise argparse.ArgumentTypeError(f"bad range {text!r}")
        out = [lo]
        while out[-1] * 2 <= hi:
            out.append(out[-1] * 2)
        return out
    return [int(p) for p in text.split(",") if p]


def _model_flags(p: argparse.ArgumentParser):
    p.add_argument("--mu1", type=float, default=0.5, help="P[attribute = 1] (default 0.5)")
    p.add_argument("--q", type=_triple, default=(0.8, 0.5, 0.2), help="kernel as q11,q10,q00")
    p.add_argument("--seed", type=int, default=None, help=f"default $MAGLAB_SEED or {DEFAULT_SEED}")
    p.add_argument("--threads", type=int, default=None, help="cap on worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maglab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample one graph and print its isolation census")
    _model_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--out", type=Path, default=Path("."), help="directory for the edge list and attributes")
    p.add_argument("--prefix", default="mag")

    p = sub.add_parser("moments", help="exact moments of the isolated-node count")
    _model_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=int, required=True)

    p = sub.add_parser("regime", help="which zero-one law applies and its predicted limit")
    _model_flags(p)
    p.add_argument("--rho", type=float, required=True)

    p = sub.add_parser("verify", help="oracle grid and identity battery")
    _model_flags(p)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--L", type=int, default=3)
    p.add_argument("--nu", type=_float_list, default=[0.2, 0.5, 0.7])

    p = sub.add_parser("sweep", help="Monte Carlo phase-transition sweep")
    _model_flags(p)
    p.add_argument("--rho", type=_float_list, required=True, help="comma-separated rho values")
    p.add_argument("--n", type=_n_list, required=True, help="comma list or lo..hi doubling range")
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--mode", choices=("census", "full-graph"), default="census")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", type=Path, default=None, help="write the table here instead of stdout")
    p.add_argument("--max-rows", type=int, default=None)
    p.add_argument("--max-seconds", type=float, default=None)
    return parser


def _params(args, n: int = 2, L: int = 1) -> MagParams:
    return MagParams.build(n, L, args.mu1, args.q)


def cmd_sample(args) -> int:
    params = _params(args, args.n, args.L)
    g = sample_graph(params, args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    edges_path = args.out / f"{args.prefix}_edges.txt"
    attrs_path = args.out / f"{args.prefix}_attributes.txt"
    write_edge_list(g, edges_path)
    write_attributes(g, attrs_path)
    census = isolation_census(g)
    print(dumps({
        "seed": args.seed, "n": params.n, "L": params.L, "edges": len(g.edges),
        "total": census.total, "by_level": list(census.by_level),
        "edges_file": str(edges_path), "attributes_file": str(attrs_path),
    }))
    return 0


def cmd_moments(args) -> int:
    params = _params(args, args.n, args.L)
    rep = moments.moment_report(params)
    print(dumps({
        "seed": args.seed, "n": params.n, "L": params.L, "mu1": params.pmf.mu1, "q": list(params.q.as_tuple()),
        "e_I": rep.e_I, "e_I_level": rep.e_I_level, "e_I_sq": rep.e_I_sq,
        "p_zero_lower": rep.p_zero_lower, "p_zero_upper": rep.p_zero_upper,
    }))
    return 0


def cmd_regime(args) -> int:
    params = _params(args)
    rep = classify_regime(args.rho, params)
    print(dumps({
        "seed": args.seed, "rho": rep.rho, "mu1": params.pmf.mu1, "q": list(params.q.as_tuple()),
        "gamma0": params.gamma0, "gamma1": params.gamma1,
        "case": rep.case, "discriminant": rep.discriminant, "nu_star": rep.nu_star,
        "threshold": rep.threshold_value, "predicted": rep.predicted_limit,
    }))
    if rep.case is Case.BOUNDARY or rep.predicted_limit.value == "Boundary":
        print("boundary case: the zero-one laws make no prediction here", file=sys.stderr)
        return EXIT_BOUNDARY
    return 0


def cmd_verify(args) -> int:
    report = experiments.VerificationReport()
    for grid_params in experiments.oracle_grid():
        experiments.verify_oracle(grid_params, report)
    identities = experiments.verify_identities(_params(args, args.n, args.L), args.nu)
    report.checks.extend(identities.checks)
    print(f"seed={args.seed}")
    for line in report.lines():
        print(line)
    failed = sum(not c.passed for c in report.checks)
    print(f"{len(report.checks) - failed}/{len(report.checks)} checks passed")
    return 0 if report.passed else EXIT_FAILED_CHECK


def cmd_sweep(args) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        config = experiments.SweepConfig(
            mu1=args.mu1, q=args.q, rho_list=args.rho, n_list=args.n,
            replications=args.reps, seed=args.seed, mode=args.mode,
            max_rows=args.max_rows, max_seconds=args.max_seconds, threads=args.threads,
        )
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    rows = experiments.run_sweep(config)
    text = experiments.rows_to_csv(rows) if args.format == "csv" else experiments.rows_to_json(rows, config) + "\n"
    if args.output is None:
        sys.stdout.write(text)
    else:
        args.output.write_text(text)
        print(dumps({"seed": config.seed, "rows": len(rows), "output": str(args.output)}))
    return 0


COMMANDS = {
    "sample": cmd_sample,
    "moments": cmd_moments,
    "regime": cmd_regime,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is None:
        args.seed = _default_seed()
    try:
        return COMMANDS[args.command](args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except experiments.ResourceLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED_CHECK
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
