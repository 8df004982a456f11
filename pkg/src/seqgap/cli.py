"""Command-line entry point.

    seqgap <subcommand> --config path.json [--seed u64] [--out path]
           [--threads N] [--format csv|json] [--svg path]

Subcommands: certify-lb, gap, recover, lemma-check, concentration.
Exit codes: 0 all checks pass, 1 at least one check failed, 2 config error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .harness import (
    COMMANDS,
    Cell,
    ConfigError,
    ExperimentConfig,
    emit_report,
    report_to_csv,
    run_experiment,
    write_svg_lines,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqgap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the experiment JSON")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="write the report to this path")
        p.add_argument("--threads", type=int, default=None, help="worker threads for cells")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--svg", default=None, help="also write a line chart (gap only)")
    return parser


def _maybe_svg(report, path: str) -> None:
    series: dict[str, list[tuple[float, float]]] = {}
    for cell in report.cells:
        if cell.m is None:
            continue
        series.setdefault(cell.algorithm, []).append((float(np.log2(cell.m)), cell.estimate))
    series = {k: sorted(v) for k, v in series.items() if len(v) >= 2}
    if series:
        write_svg_lines(path, series, title="error vs log2(m)")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        config = ExperimentConfig.from_json_dict(doc, experiment=args.command)
        if args.seed is not None:
            config.seed = args.seed
        if args.threads is not None:
            config.threads = args.threads
        if args.svg is not None:
            config.svg = args.svg
        report = run_experiment(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_path = args.out or config.output_path
    if out_path:
        emit_report(report, out_path, args.format)
    else:
        sys.stdout.write(report_to_csv(report))
    if config.svg:
        _maybe_svg(report, config.svg)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.name}: {check.detail}", file=sys.stderr)
    print(
        f"{config.experiment}: {len(report.cells)} cells, "
        f"{sum(c.passed for c in report.checks)}/{len(report.checks)} checks passed, "
        f"{report.wall_clock:.1f}s",
        file=sys.stderr,
    )
    return 0 if report.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
