"""Command-line entry point: ``scatterdiag <command> [options]``.

Windows are given as ``--window=x_min,x_max,y_min,y_max`` (the ``=`` keeps
argparse from reading a leading minus sign as an option).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .algebra import ContractError, frac_str, parse_frac
from .globalscatter import complete_global
from .invariants import (InsufficientOrder, all_checks, default_window, run_invariants,
                         stability_reports)
from .local import complete_local
from .render import render_svg
from .serialize import (global_to_json, local_from_json, local_to_json, reports_to_json,
                        table_from_csv, table_from_json, table_to_csv)
from .sources import Window, build_p2e_initial, build_sheaf_initial, gps_table

COMMANDS = ("local", "gps", "p2e", "sheaf", "invariants", "check")


@dataclass(frozen=True)
class RunConfig:
    command: str
    truncation: Optional[int] = None
    degree: Optional[int] = None
    window: Optional[Window] = None
    seed: Optional[int] = None
    input: Optional[str] = None
    output: Optional[str] = None
    svg: Optional[str] = None
    m1: Tuple[int, int] = (1, 0)
    m2: Tuple[int, int] = (0, 1)
    table: Optional[str] = None
    reading: str = "bps"
    stability: bool = False
    workers: Optional[int] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ContractError(f"unknown command {self.command!r}")
        if self.truncation is not None and self.truncation < 1:
            raise ContractError("truncation must be >= 1")
        if self.degree is not None and self.degree < 1:
            raise ContractError("degree must be >= 1")
        if self.window is not None and not self.window.meets_u():
            raise ContractError("window does not meet U")
        if self.command == "local" and self.input is None:
            raise ContractError("local needs --input")
        if self.command in ("p2e", "sheaf") and (self.truncation is None or self.window is None):
            raise ContractError(f"{self.command} needs --order and --window")
        if self.command == "gps" and self.truncation is None:
            raise ContractError("gps needs --order")
        if self.command in ("invariants", "check") and self.degree is None and self.table is None:
            raise ContractError(f"{self.command} needs --degree")

    @property
    def effective_window(self) -> Window:
        return self.window if self.window is not None else default_window(self.degree)


def _vec(text: str) -> Tuple[int, int]:
    a, b = text.split(",")
    return (int(a), int(b))


def _window(text: str) -> Window:
    parts = [parse_frac(p) for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("window needs four rationals")
    return Window(*parts)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scatterdiag", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--order", dest="truncation", type=int)
        p.add_argument("--output")
        if name == "local":
            p.add_argument("--input", required=True)
        if name == "gps":
            p.add_argument("--m1", type=_vec, default=(1, 0))
            p.add_argument("--m2", type=_vec, default=(0, 1))
        if name in ("p2e", "sheaf", "invariants", "check"):
            p.add_argument("--window", type=_window)
            p.add_argument("--seed", type=int)
            p.add_argument("--workers", type=int)
        if name in ("p2e", "sheaf"):
            p.add_argument("--svg")
        if name in ("invariants", "check"):
            p.add_argument("--degree", type=int)
            p.add_argument("--stability", action="store_true",
                           help="also rerun at order N+1 and on an enlarged window")
        if name == "check":
            p.add_argument("--table", help="check a stored table (CSV or JSON) instead of computing")
            p.add_argument("--reading", choices=("bps", "bar"), default="bps")
    return ap


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    return RunConfig(**{k: v for k, v in ns.items() if v is not None})


def _emit(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load_table(path: str):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return table_from_json(text) if text.lstrip().startswith("{") else table_from_csv(text)


def run(cfg: RunConfig) -> int:
    if cfg.command == "local":
        with open(cfg.input, encoding="utf-8") as fh:
            d = local_from_json(fh.read())
        _emit(local_to_json(complete_local(d)), cfg.output)
        return 0

    if cfg.command == "gps":
        rows = ["a,b,k,value"]
        for (a, b, k), v in gps_table(cfg.m1, cfg.m2, cfg.truncation).items():
            rows.append(f"{a},{b},{k},{frac_str(v)}")
        _emit("\n".join(rows) + "\n", cfg.output)
        return 0

    if cfg.command in ("p2e", "sheaf"):
        import random
        build = build_p2e_initial if cfg.command == "p2e" else build_sheaf_initial
        rng = random.Random(cfg.seed) if cfg.seed is not None else None
        d = complete_global(build(cfg.window, cfg.truncation), workers=cfg.workers, rng=rng)
        _emit(global_to_json(d), cfg.output)
        if cfg.svg:
            render_svg(d, cfg.svg)
        return 0

    if cfg.command == "check" and cfg.table is not None:
        table = _load_table(cfg.table)
        reports = all_checks(table, cfg.degree or table.max_degree(), cfg.reading)
    else:
        res = run_invariants(cfg.degree, cfg.truncation, cfg.effective_window,
                             workers=cfg.workers, seed=cfg.seed)
        if cfg.command == "invariants":
            _emit(table_to_csv(res.table), cfg.output)
            if not cfg.stability:
                return 0
            reports = stability_reports(res, cfg.workers)
        else:
            reports = all_checks(res.table, cfg.degree, cfg.reading)
            if cfg.stability:
                reports += stability_reports(res, cfg.workers)
    for r in reports:
        print(r.summary(), file=sys.stderr)
    if cfg.command == "check":
        _emit(reports_to_json(reports), cfg.output)
    return 0 if all(r.passed for r in reports) else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return run(config_from_args(argv))
    except InsufficientOrder as e:
        print(f"insufficient order: {e}", file=sys.stderr)
        return 3
    except (ContractError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
