"""Full detector battery on the Robinson-Trautman metric, grouped by outcome."""

from __future__ import annotations

import argparse
from collections import defaultdict

from pseudosym.catalog import builtin
from pseudosym.classify import full_report
from pseudosym.expr import Expr, to_string


def shorten(text: str, width: int) -> str:
    return text if len(text) <= width else text[: width - 3] + "..."


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--metric", default="robinson-trautman-jet")
    ap.add_argument("--trials", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--width", type=int, default=100, help="truncate printed expressions")
    args = ap.parse_args()

    rep = full_report(builtin(args.metric), trials=args.trials, seed=args.seed, timing=True)
    by_status = defaultdict(list)
    for v in rep.verdicts:
        by_status[v.status].append(v)
    print(f"{rep.metric}: {len(rep.verdicts)} verdicts in {rep.timing:.1f} s")
    for status in ("holds-with-data", "holds", "fails", "vacuous", "error"):
        rows = by_status.get(status, [])
        print(f"\n{status} ({len(rows)})")
        for v in rows:
            scalar = next((val for val in v.data.values() if isinstance(val, Expr)), None)
            extra = f"  {shorten(to_string(scalar), args.width)}" if scalar is not None else ""
            print(f"  {v.name}{extra}")


if __name__ == "__main__":
    main()
