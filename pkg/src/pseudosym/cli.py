"""Command-line entry point: ``pseudosym --metric NAME|FILE [options]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .catalog import CATALOG, builtin
from .classify import DETECTOR_NAMES, GROUPS, full_report, select
from .metricfile import MetricFileError, load_metric
from .report import ReportDocument


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pseudosym", description="Exact curvature classification of a metric.")
    p.add_argument("--metric", help="builtin metric name or path to a YAML metric file")
    p.add_argument("--checks", default="all", help="'all' or a comma list of groups and detector names")
    p.add_argument("--format", choices=("machine", "text"), default="machine")
    p.add_argument("--jet-depth", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=8, help="random exact evaluations per positive verdict")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="specialize a builtin parameter (repeatable)")
    p.add_argument("--out", help="write the report here instead of standard output")
    p.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-identical output)")
    p.add_argument("--list", action="store_true", help="list builtin metrics, groups and detectors")
    return p


def _params(items: Sequence[str]) -> dict[str, str]:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        out[name.strip()] = value.strip()
    return out


def resolve_metric(spec: str, jet_depth: int, params: dict):
    if spec in CATALOG:
        try:
            return builtin(spec, {**params, "jet_depth": jet_depth})
        except ValueError as exc:
            raise UsageError(f"--param: {exc}") from None
    if params:
        raise UsageError("--param applies to builtin metrics only")
    if not Path(spec).exists():
        raise UsageError(f"--metric: {spec!r} is neither a builtin ({', '.join(CATALOG)}) nor an existing file")
    return load_metric(spec, jet_depth)


def _listing() -> str:
    lines = ["builtin metrics:"]
    lines += [f"  {e.name}: {e.doc}" for e in CATALOG.values()]
    lines.append("groups: " + ", ".join(GROUPS))
    lines.append("detectors:")
    lines += [f"  {n}" for n in DETECTOR_NAMES]
    return "\n".join(lines) + "\n"


def run(argv: Sequence[str] | None = None) -> tuple[int, ReportDocument | None]:
    args = build_parser().parse_args(argv)
    if args.list:
        sys.stdout.write(_listing())
        return 0, None
    try:
        if not args.metric:
            raise UsageError("--metric is required")
        if args.jet_depth < 1:
            raise UsageError("--jet-depth must be positive")
        if args.trials < 0:
            raise UsageError("--trials must be >= 0")
        try:
            select(args.checks)
        except KeyError as exc:
            raise UsageError(f"--checks: {exc.args[0]}") from None
        metric = resolve_metric(args.metric, args.jet_depth, _params(args.param))
    except (UsageError, MetricFileError) as exc:
        print(f"pseudosym: error: {exc}", file=sys.stderr)
        return 2, None
    rep = full_report(metric, args.checks, trials=args.trials, seed=args.seed, timing=args.timing)
    rep.settings["checks"] = args.checks
    doc = ReportDocument.from_report(rep)
    text = doc.to_json() if args.format == "machine" else doc.to_text()
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"pseudosym: error: --out: {exc.strerror}", file=sys.stderr)
            return 2, doc
    else:
        sys.stdout.write(text)
    return 0, doc


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
