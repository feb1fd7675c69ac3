"""Command-line front end.

Subcommands map onto the library layers:

    series     evaluate the coefficient product, the power series, its
               continuation, or the pole criterion at a point
    table      print the kernel/crossing table for one p
    bound      criterion root for one p, or the full bound report for one d
    verify     run a named certificate check and exit 0 on pass, 1 on fail
    simulate   Monte-Carlo crossing/offspring estimates on product graphs
    compare    Monte-Carlo strip crossing vs the analytic lower bound

Every invocation emits one record per evaluation.  ``--format json`` prints
each record as a JSON object on its own line; ``--format csv`` prints a
header plus one row per record with parameters and outputs flattened into
``param_*`` and ``out_*`` columns; the default ``text`` prints ``key=value``
pairs.  Floats are rendered with shortest round-trip precision in every
format.  Exit status: 0 on success (and all requested checks passing),
1 when a requested check fails, 2 on usage or domain errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import TreelineError
from .genfunc import (
    DEFAULT_CONFIG,
    ProbabilityParams,
    SeriesConfig,
    coeff_product,
    criterion_threshold,
    gf_continued,
    gf_series,
    pole_criterion,
)
from .graphs import SlabSpec
from .montecarlo import estimate_crossing, estimate_offspring, exact_crossing
from .sequences import build_table, functional_residual
from .thresholds import (
    bound_report,
    check_degree_four_bound,
    check_inverse_degree_bound,
    find_criterion_root,
)

__all__ = ["RunRecord", "main", "run"]

SIGMA_GATE = 3.5


def _versions() -> str:
    import numba

    return (
        f"treeline {__version__}; python {platform.python_version()}; "
        f"numpy {np.__version__}; numba {numba.__version__}"
    )


@dataclass(frozen=True)
class RunRecord:
    """One evaluation: what was asked, what came out, and under what tool."""

    command: str
    parameters: dict
    outputs: dict
    versions: str = field(default_factory=_versions)
    seed: int | None = None


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _flat(record: RunRecord) -> dict:
    row: dict = {"command": record.command}
    for k, v in record.parameters.items():
        row[f"param_{k}"] = v
    for k, v in record.outputs.items():
        row[f"out_{k}"] = v
    row["seed"] = "" if record.seed is None else record.seed
    row["versions"] = record.versions
    return row


def _emit(records: list[RunRecord], fmt: str) -> None:
    if fmt == "json":
        for r in records:
            print(json.dumps(asdict(r)))
        return
    if fmt == "csv":
        rows = [_flat(r) for r in records]
        fields: list[str] = []
        for row in rows:
            for k in row:
                if k not in fields:
                    fields.append(k)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, restval="", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) if not isinstance(v, str) else v for k, v in row.items()})
        sys.stdout.write(buf.getvalue())
        return
    for r in records:
        pairs = [f"{k}={_fmt(v)}" for k, v in {**r.parameters, **r.outputs}.items()]
        print(f"[{r.command}] " + " ".join(pairs))


def _series_config(args) -> SeriesConfig:
    return SeriesConfig(
        tail_tol=args.tail_tol,
        max_terms=args.max_terms,
        singularity_margin=args.margin,
    )


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tail-tol", type=float, default=DEFAULT_CONFIG.tail_tol,
                   help="absolute series tail target (default %(default)s)")
    p.add_argument("--max-terms", type=int, default=DEFAULT_CONFIG.max_terms,
                   help="series term cap (default %(default)s)")
    p.add_argument("--margin", type=float, default=DEFAULT_CONFIG.singularity_margin,
                   help="keep-out distance from singular points (default %(default)s)")


def _add_format_flag(p: argparse.ArgumentParser, default: str = "text") -> None:
    p.add_argument("--format", choices=("text", "json", "csv"), default=default,
                   help="output record format (default %(default)s)")


def _parse_sweep(text: str, cast):
    try:
        values = [cast(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("sweep list is empty")
    return values


def cmd_series(args) -> int:
    cfg = _series_config(args)
    params = ProbabilityParams(args.p)
    outputs: dict
    check_failed = False
    if args.fn == "product":
        if args.l is None:
            raise TreelineError("--fn product needs --l")
        outputs = {"value": coeff_product(params, args.l)}
        parameters = {"p": args.p, "fn": args.fn, "l": args.l}
    elif args.fn == "series":
        if args.z is None:
            raise TreelineError("--fn series needs --z")
        outputs = {"value": gf_series(params, args.z, cfg)}
        parameters = {"p": args.p, "fn": args.fn, "z": args.z}
    elif args.fn == "continued":
        if args.x is None:
            raise TreelineError("--fn continued needs --x")
        value = gf_continued(params, args.x, cfg)
        outputs = {"value": value}
        parameters = {"p": args.p, "fn": args.fn, "x": args.x}
        if args.check_series:
            if not 0.0 <= args.x < 1.0:
                raise TreelineError("--check-series needs x inside [0, 1)")
            series_value = gf_series(params, args.x, cfg)
            tolerance = 2.0 * cfg.tail_tol
            difference = abs(value - series_value)
            agree = difference <= tolerance
            outputs.update(
                series_value=series_value,
                difference=difference,
                tolerance=tolerance,
                agree=agree,
            )
            check_failed = not agree
    else:
        if args.x is None:
            raise TreelineError("--fn criterion needs --x")
        outputs = {
            "value": pole_criterion(params, args.x, cfg),
            "threshold": criterion_threshold(params),
        }
        parameters = {"p": args.p, "fn": args.fn, "x": args.x}
    _emit([RunRecord("series", parameters, outputs)], args.format)
    return 1 if check_failed else 0


def cmd_table(args) -> int:
    cfg = _series_config(args)
    table = build_table(ProbabilityParams(args.p), args.n, cfg)
    records = [
        RunRecord(
            "table",
            {"p": args.p, "n": i + 1},
            {"kernel": float(table.kernel[i]), "crossing": float(table.crossing[i])},
        )
        for i in range(args.n)
    ]
    _emit(records, args.format)
    return 0


def cmd_bound(args) -> int:
    cfg = _series_config(args)
    if (args.d is None) == (args.p is None):
        raise TreelineError("give exactly one of --d or --p")
    if args.p is not None:
        res = find_criterion_root(ProbabilityParams(args.p), args.tol, cfg)
        rec = RunRecord(
            "bound",
            {"p": args.p, "tol": args.tol},
            {
                "root": res.root,
                "bracket_lo": res.lo,
                "bracket_hi": res.hi,
                "residual": res.residual,
                "iterations": res.iterations,
                "rate_lower_bound": 1.0 / res.root,
            },
        )
        _emit([rec], args.format)
        return 0
    report = bound_report(args.d, args.p_tol, args.tol, cfg)
    rec = RunRecord(
        "bound",
        {"d": args.d, "p_tol": args.p_tol, "tol": args.tol},
        {
            "pc_upper": report.pc_upper,
            "inverse_degree": report.inverse_degree,
            "prior_pc_upper": report.prior_pc_upper,
            "pu_lower": report.pu_lower,
            "gap_nonempty": report.gap_nonempty,
        },
    )
    _emit([rec], args.format)
    return 0


def cmd_verify(args) -> int:
    cfg = _series_config(args)
    records: list[RunRecord] = []
    passed = True
    if args.which == "inverse-degree":
        if args.d_min < 3 or args.d_max < args.d_min:
            raise TreelineError("need 3 <= d-min <= d-max")
        for d in range(args.d_min, args.d_max + 1):
            check = check_inverse_degree_bound(d, args.eps, cfg)
            records.append(
                RunRecord(
                    "verify",
                    {"which": args.which, "d": d, "eps": args.eps},
                    {
                        "p": check.p,
                        "point": check.point,
                        "criterion_value": check.criterion_value,
                        "threshold": check.threshold,
                        "floor_factor": check.floor_factor,
                        "point_ok": check.point_ok,
                        "criterion_ok": check.criterion_ok,
                        "floor_ok": check.floor_ok,
                        "passed": check.passed,
                    },
                )
            )
            passed = passed and check.passed
    elif args.which == "degree-four":
        check = check_degree_four_bound(cfg)
        records.append(
            RunRecord(
                "verify",
                {"which": args.which},
                {
                    "p": check.p,
                    "point": check.point,
                    "criterion_value": check.criterion_value,
                    "threshold": check.threshold,
                    "surrogate_value": check.surrogate_value,
                    "point_ok": check.point_ok,
                    "criterion_ok": check.criterion_ok,
                    "surrogate_ok": check.surrogate_ok,
                    "passed": check.passed,
                },
            )
        )
        passed = check.passed
    elif args.which == "functional-eq":
        residual = functional_residual(
            ProbabilityParams(args.p), args.z, args.n_terms, cfg
        )
        ok = residual <= args.limit
        records.append(
            RunRecord(
                "verify",
                {"which": args.which, "p": args.p, "z": args.z, "n_terms": args.n_terms},
                {"residual": residual, "limit": args.limit, "passed": ok},
            )
        )
        passed = ok
    else:  # limit-identity
        params = ProbabilityParams(args.p)
        table = build_table(params, args.n_terms + 1, cfg)
        ratio = (1.0 - args.p + args.p * args.p) / (1.0 - args.p)
        scale = ratio * ratio
        partial = float(table.kernel[: args.n_terms].sum())
        residual = abs(
            partial - scale * (table.crossing_at(1) - table.crossing_at(args.n_terms + 1))
        )
        ok = residual <= args.limit
        records.append(
            RunRecord(
                "verify",
                {"which": args.which, "p": args.p, "n_terms": args.n_terms},
                {"residual": residual, "limit": args.limit, "passed": ok},
            )
        )
        passed = ok
    _emit(records, args.format)
    if args.format == "text":
        print("PASS" if passed else "FAIL")
    return 0 if passed else 1


def _make_spec(args, n=None, k=None) -> SlabSpec:
    return SlabSpec(
        kind=args.graph,
        n=args.n if n is None else n,
        k=args.k if k is None else k,
        d=args.d if args.graph == "slab" else None,
    )


def cmd_simulate(args) -> int:
    sweeps = [s for s in ("sweep_p", "sweep_k", "sweep_n") if getattr(args, s)]
    if len(sweeps) > 1:
        raise TreelineError("sweeps are mutually exclusive; give at most one")
    if args.offspring and args.graph != "slab":
        raise TreelineError("--offspring needs --graph slab")
    if args.exact_check and (args.offspring or sweeps):
        raise TreelineError("--exact-check applies to a single crossing run")

    runs: list[tuple[float, SlabSpec]] = []
    if args.sweep_p:
        runs = [(p, _make_spec(args)) for p in args.sweep_p]
    elif args.sweep_k:
        runs = [(args.p, _make_spec(args, k=k)) for k in args.sweep_k]
    elif args.sweep_n:
        runs = [(args.p, _make_spec(args, n=n)) for n in args.sweep_n]
    else:
        runs = [(args.p, _make_spec(args))]

    records: list[RunRecord] = []
    failed = False
    for p, spec in runs:
        base = {
            "graph": spec.kind,
            "n": spec.n,
            "k": spec.k,
            "p": p,
            "samples": args.samples,
        }
        if spec.d is not None:
            base["d"] = spec.d
        if args.offspring:
            off = estimate_offspring(spec, p, args.samples, args.seed, args.threads)
            crossing = estimate_crossing(spec, p, args.samples, args.seed, args.threads)
            leaves = _leaf_count(spec)
            records.append(
                RunRecord(
                    "simulate",
                    {**base, "mode": "offspring"},
                    {
                        "mean": off.mean,
                        "stderr": off.stderr,
                        "leaf_count": leaves,
                        "leaf_p_hat": crossing.p_hat,
                        "leaf_p_stderr": crossing.stderr,
                        "scaled_leaf_mean": leaves * crossing.p_hat,
                    },
                    seed=args.seed,
                )
            )
            continue
        est = estimate_crossing(spec, p, args.samples, args.seed, args.threads)
        outputs = {
            "p_hat": est.p_hat,
            "stderr": est.stderr,
            "successes": est.successes,
        }
        if args.exact_check:
            exact = exact_crossing(spec, p)
            gate = SIGMA_GATE * est.stderr
            deviation = abs(est.p_hat - exact)
            ok = deviation <= gate
            outputs.update(exact=exact, deviation=deviation, gate=gate, agree=ok)
            failed = failed or not ok
        records.append(RunRecord("simulate", {**base, "mode": "crossing"}, outputs, seed=args.seed))
    _emit(records, args.format)
    return 1 if failed else 0


def _leaf_count(spec: SlabSpec) -> int:
    return spec.branching**spec.n


def cmd_compare(args) -> int:
    cfg = _series_config(args)
    spec = SlabSpec(kind="strip", n=args.n, k=args.k)
    est = estimate_crossing(spec, args.p, args.samples, args.seed, args.threads)
    table = build_table(ProbabilityParams(args.p), args.n, cfg)
    bound = table.crossing_at(args.n)
    margin = est.p_hat + SIGMA_GATE * est.stderr - bound
    ok = margin >= 0.0
    rec = RunRecord(
        "compare",
        {"p": args.p, "n": args.n, "k": args.k, "samples": args.samples},
        {
            "p_hat": est.p_hat,
            "stderr": est.stderr,
            "bound": bound,
            "margin": margin,
            "dominates": ok,
        },
        seed=args.seed,
    )
    _emit([rec], args.format)
    if args.format == "text":
        print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeline",
        description="Certified percolation bounds on tree-times-line graphs "
        "and Monte-Carlo checks of the same quantities.",
    )
    parser.add_argument("--version", action="version", version=_versions())
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_series = sub.add_parser("series", help="evaluate one analytic function at a point")
    p_series.add_argument("--p", type=float, required=True, help="edge probability")
    p_series.add_argument("--fn", choices=("product", "series", "continued", "criterion"),
                          required=True, help="which function to evaluate")
    p_series.add_argument("--l", type=int, help="index for --fn product")
    p_series.add_argument("--z", type=float, help="point inside the disc for --fn series")
    p_series.add_argument("--x", type=float, help="point for --fn continued/criterion")
    p_series.add_argument("--check-series", action="store_true",
                          help="with --fn continued and x in [0,1): compare against "
                          "the direct series and fail if they disagree")
    _add_config_flags(p_series)
    _add_format_flag(p_series)
    p_series.set_defaults(func=cmd_series)

    p_table = sub.add_parser("table", help="kernel/crossing lower-bound table")
    p_table.add_argument("--p", type=float, required=True)
    p_table.add_argument("--n", type=int, required=True, help="table length")
    _add_config_flags(p_table)
    _add_format_flag(p_table, default="csv")
    p_table.set_defaults(func=cmd_table)

    p_bound = sub.add_parser("bound", help="criterion root (--p) or bound report (--d)")
    p_bound.add_argument("--p", type=float, help="edge probability for the root")
    p_bound.add_argument("--d", type=int, help="tree degree for the bound report")
    p_bound.add_argument("--tol", type=float, default=1e-9, help="root tolerance")
    p_bound.add_argument("--p-tol", type=float, default=1e-6,
                         help="bisection tolerance in p for --d")
    _add_config_flags(p_bound)
    _add_format_flag(p_bound)
    p_bound.set_defaults(func=cmd_bound)

    p_verify = sub.add_parser("verify", help="run one named certificate check")
    p_verify.add_argument(
        "which",
        choices=("inverse-degree", "degree-four", "functional-eq", "limit-identity"),
    )
    p_verify.add_argument("--d-min", type=int, default=3)
    p_verify.add_argument("--d-max", type=int, default=20)
    p_verify.add_argument("--eps", type=float, default=1e-3,
                          help="offset above 1/d for inverse-degree")
    p_verify.add_argument("--p", type=float, default=None,
                          help="edge probability (default per check)")
    p_verify.add_argument("--z", type=float, default=0.4)
    p_verify.add_argument("--n-terms", type=int, default=200)
    p_verify.add_argument("--limit", type=float, default=None,
                          help="residual acceptance limit (default per check)")
    _add_config_flags(p_verify)
    _add_format_flag(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_sim = sub.add_parser("simulate", help="Monte-Carlo estimates on a product graph")
    p_sim.add_argument("--graph", choices=("strip", "slab"), required=True)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--k", type=int, default=100, help="line half-width (default 100)")
    p_sim.add_argument("--d", type=int, help="tree degree (slab only)")
    p_sim.add_argument("--p", type=float, required=True)
    p_sim.add_argument("--samples", type=int, default=100_000)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--threads", type=int, default=None)
    p_sim.add_argument("--offspring", action="store_true",
                       help="estimate the mean reached-leaf count (slab)")
    p_sim.add_argument("--exact-check", action="store_true",
                       help="compare against exact enumeration (tiny graphs)")
    p_sim.add_argument("--sweep-p", type=lambda s: _parse_sweep(s, float), default=None,
                       help="comma-separated p values")
    p_sim.add_argument("--sweep-k", type=lambda s: _parse_sweep(s, int), default=None,
                       help="comma-separated k values")
    p_sim.add_argument("--sweep-n", type=lambda s: _parse_sweep(s, int), default=None,
                       help="comma-separated n values")
    _add_format_flag(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_cmp = sub.add_parser("compare", help="strip crossing estimate vs analytic bound")
    p_cmp.add_argument("--p", type=float, required=True)
    p_cmp.add_argument("--n", type=int, required=True)
    p_cmp.add_argument("--k", type=int, default=100)
    p_cmp.add_argument("--samples", type=int, default=100_000)
    p_cmp.add_argument("--seed", type=int, required=True)
    p_cmp.add_argument("--threads", type=int, default=None)
    _add_config_flags(p_cmp)
    _add_format_flag(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    return parser


_DEFAULT_LIMITS = {"functional-eq": 1e-8, "limit-identity": 1e-10}
_DEFAULT_VERIFY_P = {"functional-eq": 0.25, "limit-identity": 0.3}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "subcommand", None) == "verify":
        if args.limit is None:
            args.limit = _DEFAULT_LIMITS.get(args.which, 0.0)
        if args.p is None:
            args.p = _DEFAULT_VERIFY_P.get(args.which, 0.25)
    try:
        return args.func(args)
    except TreelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
