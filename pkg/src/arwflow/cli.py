"""Command-line entry point.

Subcommands::

    arwflow run <cfg>
    arwflow validate-background <cfg>
    arwflow oracle [--dt-max X]
    arwflow sweep <cfg> --param <dotted.key> --values a,b,c

Exit codes: 0 success, 2 validation failure, 3 step failure.
The ARWFLOW_OUTDIR environment variable redirects all file outputs.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

from .background import validate_arw
from .config import parse_config
from .errors import ArwFlowError, ConfigError, InvalidInitialData, StepFailure
from .oracle import format_table, run_oracle_suite
from .runner import run_experiment

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_STEP_FAILURE = 3


def cmd_run(args):
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        records, summary = run_experiment(cfg)
    except InvalidInitialData as exc:
        print(f"invalid initial data: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except StepFailure as exc:
        print(f"step failure: {exc}", file=sys.stderr)
        return EXIT_STEP_FAILURE
    csv_path, json_path = cfg.output_paths()
    final = summary["final"]
    print(f"run complete: t={summary['run']['t_final']:g} "
          f"osc(u_tilde)={final['osc_u_tilde']:.3e} "
          f"steps={summary['run']['steps_accepted']}")
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def cmd_validate_background(args):
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report = validate_arw(cfg.background)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_oracle(args):
    rows = run_oracle_suite(dt_max=args.dt_max)
    print(format_table(rows))
    failing = [r for r in rows if not r.passed]
    if failing:
        print(f"{len(failing)} oracle check(s) failed", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_sweep(args):
    try:
        cfg0 = parse_config(args.config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        print("sweep needs a non-empty value list", file=sys.stderr)
        return EXIT_VALIDATION

    rows = []
    base = dict(cfg0.raw)
    for value in values:
        mapping = dict(base)
        if args.param not in mapping:
            print(f"unknown sweep parameter {args.param!r}", file=sys.stderr)
            return EXIT_VALIDATION
        mapping[args.param] = value
        stem = f"sweep_{args.param.replace('.', '_')}_{value}"
        mapping["output.csv_path"] = stem + ".csv"
        mapping["output.json_path"] = stem + ".json"
        try:
            from .config import from_mapping
            cfg = from_mapping(mapping, where=f"sweep value {value}")
        except ConfigError as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        try:
            records, summary = run_experiment(cfg)
        except InvalidInitialData as exc:
            print(f"invalid initial data at {args.param}={value}: {exc}",
                  file=sys.stderr)
            return EXIT_VALIDATION
        except StepFailure as exc:
            print(f"step failure at {args.param}={value}: {exc}", file=sys.stderr)
            return EXIT_STEP_FAILURE
        rate = summary["rates"]["umbilicity_ratio"]
        rows.append({
            "param": args.param,
            "value": value,
            "fitted_umbilicity_ratio_slope": rate["fitted"],
            "predicted_umbilicity_ratio_slope": rate["predicted"],
            "converged": rate["converged"],
            "osc_final": summary["final"]["osc_u_tilde"],
            "osc_initial": records[0].osc_u_tilde,
        })

    out_path = args.output
    if os.environ.get("ARWFLOW_OUTDIR"):
        out_path = os.path.join(os.environ["ARWFLOW_OUTDIR"],
                                os.path.basename(out_path))
    with open(out_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {out_path} ({len(rows)} rows)")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="arwflow",
        description="Inverse curvature flow simulator for ARW spacetimes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configured flow")
    p_run.add_argument("config")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser(
        "validate-background", help="check the ARW conditions of a background"
    )
    p_val.add_argument("config")
    p_val.set_defaults(func=cmd_validate_background)

    p_oracle = sub.add_parser("oracle", help="run the built-in oracle suite")
    p_oracle.add_argument("--dt-max", type=float, default=0.05)
    p_oracle.set_defaults(func=cmd_oracle)

    p_sweep = sub.add_parser("sweep", help="batch runs over one parameter")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", required=True)
    p_sweep.add_argument("--values", required=True)
    p_sweep.add_argument("--output", default="sweep.csv")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ArwFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
