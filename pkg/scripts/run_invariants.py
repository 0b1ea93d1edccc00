"""Compute the invariant table up to a degree, run every check and time it.

    python scripts/run_invariants.py --degree 3 [--stability] [--out results/]
"""

import argparse
import time
from pathlib import Path

from scatterdiag.invariants import all_checks, run_invariants, stability_reports
from scatterdiag.serialize import reports_to_json, table_to_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degree", type=int, default=3)
    ap.add_argument("--order", type=int, help="truncation (default: twice the degree)")
    ap.add_argument("--workers", type=int)
    ap.add_argument("--stability", action="store_true")
    ap.add_argument("--out", type=Path, help="directory for table.csv and checks.json")
    args = ap.parse_args()

    t0 = time.perf_counter()

    def progress(level, points, new, total):
        print(f"[{time.perf_counter() - t0:7.1f}s] level {level}: "
              f"{points} points, {new} new rays, {total} rays")

    res = run_invariants(args.degree, args.order, workers=args.workers, progress=progress)
    print(f"completed at order {res.truncation} on {res.window} "
          f"in {time.perf_counter() - t0:.1f}s; signs {res.signs}")
    print(table_to_csv(res.table), end="")

    reports = all_checks(res.table, args.degree)
    if args.stability:
        reports += stability_reports(res, args.workers)
    for r in reports:
        print(r.summary())
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "table.csv").write_text(table_to_csv(res.table))
        (args.out / "checks.json").write_text(reports_to_json(reports))
    print(f"total {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
