"""Command-line surface.

Subcommands: walk, field, gff, scan, fit, compare-centerings,
verify-analytic, summarize, plot-data.  Every stochastic subcommand requires
--seed; results are reproducible bit-for-bit regardless of worker count
(COVERTREE_THREADS caps workers, hardware count otherwise).  A --config FILE
of flat key=value lines may supply any long option, with command-line flags
taking precedence; unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytic
from .gff import sample_gff_max
from .harness import fit_centering, threshold_scan
from .rayknight import sample_field
from .records import (
    emit_records,
    format_cell,
    read_csv,
    read_meta,
    read_records,
    summarize_records,
    write_csv,
)
from .replicas import ReplicaSummary, run_replica_records
from .tree import TreeParams
from .verify import verify_analytic
from .walk import run_until_cover, run_until_inverse_local_time

WALK_KEYS = ["replica", "seed", "depth", "t", "tau_t", "cover_time", "covered", "jumps"]
FIELD_KEYS = ["replica", "depth", "t", "min_leaf", "zero_leaves", "covered",
              "level_min", "level_mean"]
GFF_KEYS = ["replica", "depth", "max_all", "max_leaf", "argmax_level"]
SCAN_KEYS = ["depth", "sqrt_t_star", "t_star", "sqrt_lo", "sqrt_hi", "probes",
             "replicas_per_probe", "flagged"]

# Asymptotic second-order slopes of the two centerings, reported (never
# asserted) by compare-centerings: cover threshold in sqrt(t) units carries
# B -> -1/(2 sqrt(log 2)), the field maximum rescaled by 1/sqrt(2) carries
# B -> -3/(4 sqrt(log 2)).
COVER_B_LIMIT = -1.0 / (2.0 * analytic.SQRT_LOG2)
GFF_B_LIMIT = -3.0 / (4.0 * analytic.SQRT_LOG2)


def _parse_range(text: str) -> list[int]:
    """'8..16' -> [8..16]; a bare integer is a single-element range."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty depth range {text!r}")
        return list(range(lo, hi + 1))
    return [int(text)]


def _parse_grid(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _load_config_args(path: str, parser: argparse.ArgumentParser,
                      valid: dict[str, argparse.Action]) -> list[str]:
    """Turn a flat key=value config file into an argv prefix."""
    args: list[str] = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        parser.error(f"cannot read config file {path}: {exc}")
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            parser.error(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        flag = "--" + key
        action = valid.get(flag)
        if action is None or key == "config":
            parser.error(f"{path}:{lineno}: unknown config key {key!r}")
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            if value.lower() in ("true", "1", "yes"):
                args.append(flag)
            elif value.lower() not in ("false", "0", "no"):
                parser.error(f"{path}:{lineno}: boolean expected for {key!r}, got {value!r}")
        else:
            args.extend([flag, value])
    return args


def _option_map(parser: argparse.ArgumentParser) -> dict[str, argparse.Action]:
    return {s: a for a in parser._actions for s in a.option_strings}


def _require(parser, args, names: list[str]) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        parser.error("missing required arguments: " + ", ".join(missing))


def _print_summary(summary: ReplicaSummary, value_field: str) -> None:
    print(
        f"value={value_field} estimate={summary.estimate:.17g} "
        f"stderr={summary.stderr:.17g} replicas={summary.replicas} "
        f"master_seed={summary.master_seed}"
    )


def _meta(args, subcommand: str, key_order: list[str]) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}
    return {
        "subcommand": subcommand,
        "config": config,
        "master_seed": getattr(args, "seed", None),
        "version": __version__,
        "key_order": key_order,
    }


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def cmd_walk(parser, args) -> int:
    _require(parser, args, ["seed", "out"])
    if args.depth is None and args.depth_range is None:
        parser.error("missing required arguments: --depth (or --depth-range)")
    if not args.cover_only and args.t is None and args.t_grid is None:
        parser.error("missing required arguments: --t (or --t-grid)")
    depths = args.depth_range if args.depth_range else [args.depth]
    if min(depths) < 1:
        parser.error("walk requires depth >= 1")
    ts: list[float | None]
    if args.cover_only:
        ts = [None]
    else:
        ts = args.t_grid if args.t_grid else [args.t]
        if min(ts) <= 0:
            parser.error("walk requires t > 0")

    records = []
    combo = 0
    for depth in depths:
        p = TreeParams(depth)
        for t in ts:
            def one(i, rng, fingerprint, depth=depth, t=t, p=p):
                if t is None:
                    o = run_until_cover(p, rng)
                else:
                    o = run_until_inverse_local_time(p, t, rng)
                return {
                    "replica": i, "seed": fingerprint, "depth": depth, "t": t,
                    "tau_t": o.tau_t, "cover_time": o.cover_time,
                    "covered": o.covered, "jumps": o.jump_count,
                }
            records.extend(run_replica_records(one, args.replicas, args.seed, key=(combo,)))
            combo += 1
    emit_records(args.out, records, WALK_KEYS, _meta(args, "walk", WALK_KEYS))
    if records:
        value_field = "cover_time" if args.cover_only else "tau_t"
        _print_summary(summarize_records(records, value_field, args.seed), value_field)
    return 0


def cmd_field(parser, args) -> int:
    _require(parser, args, ["seed", "out"])
    if args.depth is None and args.depth_range is None:
        parser.error("missing required arguments: --depth (or --depth-range)")
    if args.t is None and args.t_grid is None:
        parser.error("missing required arguments: --t (or --t-grid)")
    depths = args.depth_range if args.depth_range else [args.depth]
    ts = args.t_grid if args.t_grid else [args.t]
    if min(depths) < 1:
        parser.error("field requires depth >= 1")
    if min(ts) <= 0:
        parser.error("field requires t > 0")

    records = []
    combo = 0
    for depth in depths:
        p = TreeParams(depth)
        for t in ts:
            def one(i, rng, fingerprint, depth=depth, t=t, p=p):
                s = sample_field(p, t, rng, emit_levels=args.emit_levels)
                rec = {
                    "replica": i, "depth": depth, "t": t,
                    "min_leaf": s.min_leaf, "zero_leaves": s.zero_leaf_count,
                    "covered": s.covered,
                }
                if args.emit_levels:
                    rec["level_min"] = s.level_min
                    rec["level_mean"] = s.level_mean
                return rec
            records.extend(run_replica_records(one, args.replicas, args.seed, key=(combo,)))
            combo += 1
    emit_records(args.out, records, FIELD_KEYS, _meta(args, "field", FIELD_KEYS))
    if records:
        _print_summary(summarize_records(records, "covered", args.seed), "covered")
    return 0


def cmd_gff(parser, args) -> int:
    _require(parser, args, ["seed", "out"])
    if args.depth is None and args.depth_range is None:
        parser.error("missing required arguments: --depth (or --depth-range)")
    depths = args.depth_range if args.depth_range else [args.depth]
    if min(depths) < 1:
        parser.error("gff requires depth >= 1")

    records = []
    for combo, depth in enumerate(depths):
        p = TreeParams(depth)

        def one(i, rng, fingerprint, depth=depth, p=p):
            s = sample_gff_max(p, rng)
            return {
                "replica": i, "depth": depth, "max_all": s.max_all,
                "max_leaf": s.max_leaf, "argmax_level": s.argmax_level,
            }
        records.extend(run_replica_records(one, args.replicas, args.seed, key=(combo,)))
    emit_records(args.out, records, GFF_KEYS, _meta(args, "gff", GFF_KEYS))
    if records:
        _print_summary(summarize_records(records, "max_leaf", args.seed), "max_leaf")
    return 0


def cmd_scan(parser, args) -> int:
    _require(parser, args, ["depth_range", "seed", "out"])
    rows = []
    flagged_any = False
    for depth in args.depth_range:
        res = threshold_scan(
            TreeParams(depth),
            target=args.target,
            tolerance=args.tol,
            seed=args.seed,
            budget=args.budget,
            replicas_per_probe=args.replicas_per_probe,
        )
        flagged_any |= res.flagged
        rows.append([res.depth, res.sqrt_t_star, res.t_star, res.sqrt_lo, res.sqrt_hi,
                     res.probes, res.replicas_per_probe, res.flagged])
        print(f"depth={res.depth} sqrt_t_star={res.sqrt_t_star:.6g} "
              f"probes={res.probes} flagged={res.flagged}")
    write_csv(args.out, SCAN_KEYS, rows)
    meta_path = Path(args.out)
    meta_path.with_name(meta_path.name + ".meta.json").write_text(
        json.dumps(_meta(args, "scan", SCAN_KEYS), indent=2, sort_keys=True) + "\n"
    )
    if flagged_any:
        print("warning: at least one depth is flagged (partial or weak bracket)",
              file=sys.stderr)
    return 0


_MODEL_CANON = "A*n+B*log(n)+C"


def _check_model(parser, model: str) -> None:
    if model is not None and model.replace(" ", "") != _MODEL_CANON:
        parser.error(f"unsupported model {model!r}; only {_MODEL_CANON} is available")


def _numeric_column(rows: list[dict], *candidates: str) -> tuple[str, np.ndarray]:
    for name in candidates:
        if rows and name in rows[0]:
            return name, np.array([float(r[name]) for r in rows])
    raise ValueError(f"none of the columns {candidates} found in {sorted(rows[0]) if rows else []}")


def cmd_fit(parser, args) -> int:
    _check_model(parser, args.model)
    rows = read_csv(args.infile)
    if not rows:
        parser.error(f"no rows in {args.infile}")
    try:
        _, ns = _numeric_column(rows, "depth", "n", "x")
        value_col = args.value_col
        if value_col:
            vals = np.array([float(r[value_col]) for r in rows])
        else:
            value_col, vals = _numeric_column(rows, "value", "sqrt_t_star", "y", "mean")
        fit = fit_centering(list(zip(ns, vals)))
    except (KeyError, ValueError) as exc:
        parser.error(str(exc))
    print(f"value={value_col} A={fit.A:.17g} B={fit.B:.17g} C={fit.C:.17g} "
          f"residual_rms={fit.residual_rms:.17g} n_range={fit.n_range[0]}..{fit.n_range[1]}")
    if args.out:
        write_csv(args.out, ["model", "value", "A", "B", "C", "residual_rms", "n_min", "n_max"],
                  [[_MODEL_CANON, value_col, fit.A, fit.B, fit.C, fit.residual_rms,
                    fit.n_range[0], fit.n_range[1]]])
    return 0


def cmd_compare_centerings(parser, args) -> int:
    cover_rows = read_csv(args.cover)
    gff_rows = read_csv(args.gff)
    try:
        _, cover_n = _numeric_column(cover_rows, "depth", "n", "x")
        _, cover_v = _numeric_column(cover_rows, "sqrt_t_star", "value", "y")
        _, gff_n = _numeric_column(gff_rows, "depth", "n", "x")
        _, gff_v = _numeric_column(gff_rows, "value", "y", "max_leaf", "mean")
        fit_cover = fit_centering(list(zip(cover_n, cover_v)))
        fit_gff = fit_centering(list(zip(gff_n, gff_v / math.sqrt(2.0))))
    except (KeyError, ValueError) as exc:
        parser.error(str(exc))
    header = ["series", "A_fit", "B_fit", "C_fit", "residual_rms",
              "A_limit", "B_limit", "B_fit_negative"]
    rows = [
        ["cover_sqrt_t", fit_cover.A, fit_cover.B, fit_cover.C, fit_cover.residual_rms,
         analytic.SQRT_LOG2, COVER_B_LIMIT, fit_cover.B < 0],
        ["gff_div_sqrt2", fit_gff.A, fit_gff.B, fit_gff.C, fit_gff.residual_rms,
         analytic.SQRT_LOG2, GFF_B_LIMIT, fit_gff.B < 0],
    ]
    write_csv(args.out, header, rows)
    for row in rows:
        print(" ".join(f"{h}={format_cell(v)}" for h, v in zip(header, row)))
    if fit_cover.B >= 0 or fit_gff.B >= 0:
        print("comparison check failed: a fitted log-coefficient is nonnegative",
              file=sys.stderr)
        return 1
    return 0


def cmd_verify_analytic(parser, args) -> int:
    _require(parser, args, ["seed"])
    rows = verify_analytic(args.seed)
    table = [[r.check, r.passed, r.statistic, r.threshold, r.detail] for r in rows]
    if args.out:
        write_csv(args.out, ["check", "passed", "statistic", "threshold", "detail"], table)
    failed = 0
    for r in rows:
        status = "pass" if r.passed else "FAIL"
        failed += not r.passed
        print(f"{status:4s} {r.check:32s} statistic={r.statistic:.6g} threshold={r.threshold:.6g}")
    print(f"{len(rows) - failed}/{len(rows)} checks passed")
    return 0 if failed == 0 else 1


_DEFAULT_VALUE_FIELD = {"walk": "tau_t", "field": "covered", "gff": "max_leaf"}


def cmd_summarize(parser, args) -> int:
    records = read_records(args.infile)
    if not records:
        parser.error(f"no records in {args.infile}")
    meta = read_meta(args.infile)
    value_field = args.value_field
    if value_field is None and meta is not None:
        sub = meta.get("subcommand")
        value_field = _DEFAULT_VALUE_FIELD.get(sub)
        if sub == "walk" and meta.get("config", {}).get("cover_only"):
            value_field = "cover_time"
    if value_field is None:
        parser.error("--value-field is required when no meta sidecar is present")
    master_seed = (meta or {}).get("master_seed", 0) or 0
    try:
        summary = summarize_records(records, value_field, master_seed)
    except ValueError as exc:
        parser.error(str(exc))
    _print_summary(summary, value_field)
    return 0


def cmd_plot_data(parser, args) -> int:
    infile = Path(args.infile)
    if infile.suffix == ".jsonl":
        records = read_records(infile)
        if not records:
            parser.error(f"no records in {infile}")
        _require(parser, args, ["x", "y"])
        groups: dict[float, list[float]] = {}
        for rec in records:
            if rec.get(args.x) is None or rec.get(args.y) is None:
                parser.error(f"records lack {args.x!r}/{args.y!r} values")
            groups.setdefault(float(rec[args.x]), []).append(float(rec[args.y]))
        rows = []
        for x in sorted(groups):
            vals = np.array(groups[x])
            yerr = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
            rows.append([x, float(vals.mean()), yerr])
    else:
        table = read_csv(infile)
        if not table:
            parser.error(f"no rows in {infile}")
        _require(parser, args, ["x", "y"])
        try:
            rows = [
                [float(r[args.x]), float(r[args.y]),
                 float(r[args.yerr]) if args.yerr else 0.0]
                for r in table
            ]
        except KeyError as exc:
            parser.error(f"column {exc} not found in {infile}")
        rows.sort(key=lambda r: r[0])
    write_csv(args.out, ["x", "y", "yerr"], rows)
    return 0


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covertree",
        description="Cover-time laboratory for random walk on the binary tree",
    )
    parser.add_argument("--version", action="version", version=f"covertree {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def add_common(sp, seed=True):
        sp.add_argument("--config", help="flat key=value file; flags take precedence")
        if seed:
            sp.add_argument("--seed", type=int, help="master seed (required)")

    def add_depth(sp):
        sp.add_argument("--depth", type=int)
        sp.add_argument("--depth-range", type=_parse_range, metavar="LO..HI")

    walk = sub.add_parser("walk", help="event-driven random walk replicas")
    add_common(walk)
    add_depth(walk)
    walk.add_argument("--t", type=float, help="root local time defining tau(t)")
    walk.add_argument("--t-grid", type=_parse_grid, metavar="T1,T2,...")
    walk.add_argument("--replicas", type=int, default=100)
    walk.add_argument("--cover-only", action="store_true",
                      help="run to cover time instead of tau(t)")
    walk.add_argument("--out", help="output JSONL path")
    walk.set_defaults(func=cmd_walk)

    field = sub.add_parser("field", help="fast local-time field replicas")
    add_common(field)
    add_depth(field)
    field.add_argument("--t", type=float)
    field.add_argument("--t-grid", type=_parse_grid, metavar="T1,T2,...")
    field.add_argument("--replicas", type=int, default=100)
    field.add_argument("--emit-levels", action="store_true",
                       help="add per-level min/mean arrays to each record")
    field.add_argument("--out", help="output JSONL path")
    field.set_defaults(func=cmd_field)

    gff = sub.add_parser("gff", help="Gaussian free field maxima replicas")
    add_common(gff)
    add_depth(gff)
    gff.add_argument("--replicas", type=int, default=100)
    gff.add_argument("--out", help="output JSONL path")
    gff.set_defaults(func=cmd_gff)

    scan = sub.add_parser("scan", help="coverage-threshold bisection over depths")
    add_common(scan)
    scan.add_argument("--depth-range", type=_parse_range, metavar="LO..HI")
    scan.add_argument("--target", type=float, default=0.5,
                      help="coverage probability defining t_star (default 0.5)")
    scan.add_argument("--tol", type=float, default=0.02,
                      help="relative sqrt(t) bracket tolerance (default 0.02)")
    scan.add_argument("--replicas-per-probe", type=int, default=2000)
    scan.add_argument("--budget", type=int, default=40, help="max probes per depth")
    scan.add_argument("--out", help="output CSV path")
    scan.set_defaults(func=cmd_scan)

    fit = sub.add_parser("fit", help="least-squares centering fit A*n+B*log(n)+C")
    add_common(fit, seed=False)
    fit.add_argument("--in", dest="infile", required=True, help="input CSV")
    fit.add_argument("--model", default=_MODEL_CANON)
    fit.add_argument("--value-col", help="value column (default: auto-detect)")
    fit.add_argument("--out", help="optional output CSV")
    fit.set_defaults(func=cmd_fit)

    comp = sub.add_parser("compare-centerings",
                          help="fit cover and GFF centerings side by side")
    add_common(comp, seed=False)
    comp.add_argument("--cover", required=True, help="scan CSV (depth, sqrt_t_star)")
    comp.add_argument("--gff", required=True, help="CSV of per-depth GFF maxima (x, y)")
    comp.add_argument("--out", required=True, help="output table CSV")
    comp.set_defaults(func=cmd_compare_centerings)

    ver = sub.add_parser("verify-analytic", help="run the analytic invariant suite")
    add_common(ver)
    ver.add_argument("--out", help="output CSV path")
    ver.set_defaults(func=cmd_verify_analytic)

    summ = sub.add_parser("summarize", help="recompute the summary of a JSONL run")
    add_common(summ, seed=False)
    summ.add_argument("--in", dest="infile", required=True)
    summ.add_argument("--value-field")
    summ.set_defaults(func=cmd_summarize)

    plot = sub.add_parser("plot-data", help="emit (x, y, yerr) CSV for plotting")
    add_common(plot, seed=False)
    plot.add_argument("--in", dest="infile", required=True)
    plot.add_argument("--x", help="x key (JSONL grouping key or CSV column)")
    plot.add_argument("--y", help="y key")
    plot.add_argument("--yerr", help="yerr CSV column (optional)")
    plot.add_argument("--out", required=True)
    plot.set_defaults(func=cmd_plot_data)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.error("a subcommand is required")
    subparser = None
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            subparser = action.choices[args.subcommand]
    if getattr(args, "config", None):
        config_args = _load_config_args(args.config, subparser, _option_map(subparser))
        merged = config_args + [a for a in argv[1:]]
        args = subparser.parse_args(merged, namespace=argparse.Namespace())
        args.subcommand = subparser.prog.split()[-1]
    if hasattr(args, "seed") and args.seed is None:
        subparser.error("missing required arguments: --seed")
    return args.func(subparser, args)


if __name__ == "__main__":
    sys.exit(main())
