"""JSON and CSV forms of diagrams, invariant tables and check reports.

Rationals are always written as "num/den" strings.  Dumps use a fixed key
order and a trailing newline so that identical values give identical bytes.
"""

from __future__ import annotations

import csv
import functools
import io
import json
from fractions import Fraction
from typing import Dict, List, Tuple

from .algebra import ContractError, GradedSeries, frac_str, parse_frac, term_sort_key
from .globalscatter import GlobalDiagram, GlobalRay
from .invariants import CheckReport, InvariantTable
from .local import LocalDiagram, LocalRay
from .sources import Window


def _malformed_as_contract_error(fn):
    @functools.wraps(fn)
    def wrapper(text):
        try:
            return fn(text)
        except ContractError:
            raise
        except (ValueError, KeyError, TypeError, IndexError, ZeroDivisionError) as e:
            raise ContractError(f"malformed input: {e!r}") from e
    return wrapper


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, ensure_ascii=True) + "\n"


def _order_json(o):
    return o if isinstance(o, int) else sorted(o)


def _order_parse(o):
    if isinstance(o, int):
        return o
    if isinstance(o, list):
        return frozenset(int(i) for i in o)
    raise ContractError(f"bad order {o!r}")


def series_json(f: GradedSeries) -> List[dict]:
    return [{"m": [m[0], m[1]], "order": _order_json(o), "coeff": frac_str(c)}
            for (m, o), c in f.items()]


def series_parse(items, truncation: int) -> GradedSeries:
    terms = {}
    for it in items:
        key = ((int(it["m"][0]), int(it["m"][1])), _order_parse(it["order"]))
        if key in terms:
            raise ContractError(f"duplicate term {key}")
        terms[key] = parse_frac(it["coeff"])
    return GradedSeries(terms, truncation)


# --- local diagrams --------------------------------------------------------

def local_to_json(d: LocalDiagram) -> str:
    return _dump({
        "truncation": d.truncation,
        "form": d.form,
        "rays": [{"dir": list(r.direction),
                  "orientation": "out" if r.outgoing else "in",
                  "function": series_json(r.function)} for r in d.rays],
    })


@_malformed_as_contract_error
def local_from_json(text: str) -> LocalDiagram:
    obj = _load(text)
    n = int(obj["truncation"])
    rays = []
    for r in obj["rays"]:
        if r["orientation"] not in ("in", "out"):
            raise ContractError(f"bad orientation {r['orientation']!r}")
        rays.append(LocalRay(tuple(int(v) for v in r["dir"]), r["orientation"] == "out",
                             series_parse(r["function"], n)))
    return LocalDiagram(tuple(rays), n, int(obj.get("form", 1)))


# --- global diagrams -------------------------------------------------------

def global_to_json(d: GlobalDiagram) -> str:
    return _dump({
        "truncation": d.truncation,
        "form": d.form,
        "window": [frac_str(v) for v in d.window.as_tuple()],
        "rays": [{"base": [frac_str(r.base[0]), frac_str(r.base[1])],
                  "dir": list(r.direction),
                  "charge": list(r.charge) if r.charge is not None else None,
                  "function": series_json(r.function)} for r in d.rays],
    })


@_malformed_as_contract_error
def global_from_json(text: str) -> GlobalDiagram:
    obj = _load(text)
    n = int(obj["truncation"])
    w = Window(*(parse_frac(v) for v in obj["window"]))
    rays = tuple(GlobalRay((parse_frac(r["base"][0]), parse_frac(r["base"][1])),
                           tuple(int(v) for v in r["dir"]),
                           series_parse(r["function"], n),
                           r.get("charge"))
                 for r in obj["rays"])
    return GlobalDiagram(rays, w, n, int(obj.get("form", 1)))


def _load(text: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ContractError(f"malformed JSON: {e}") from e
    if not isinstance(obj, dict) or "truncation" not in obj or "rays" not in obj:
        raise ContractError("diagram JSON needs 'truncation' and 'rays'")
    return obj


# --- invariant tables ------------------------------------------------------

SIDES = ("gw", "gw_bar", "bps", "sheaf")
CSV_HEADER = ["side", "d", "k_or_chi", "value"]


def table_to_csv(t: InvariantTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for side, d, k, v in t.rows():
        w.writerow([side, d, k, frac_str(v)])
    return buf.getvalue()


@_malformed_as_contract_error
def table_from_csv(text: str) -> InvariantTable:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER:
        raise ContractError(f"CSV header must be {','.join(CSV_HEADER)}")
    parts: Dict[str, Dict[Tuple[int, int], Fraction]] = {s: {} for s in SIDES}
    for n, row in enumerate(rows[1:], 2):
        if not row:
            continue
        if len(row) != 4:
            raise ContractError(f"line {n}: expected 4 fields, got {len(row)}")
        side, d, k, v = row
        if side not in parts:
            raise ContractError(f"line {n}: unknown side {side!r}")
        try:
            parts[side][(int(d), int(k))] = parse_frac(v)
        except (ValueError, ZeroDivisionError) as e:
            raise ContractError(f"line {n}: {e}") from e
    return InvariantTable(**parts)


def table_to_json(t: InvariantTable) -> str:
    return _dump({side: [{"d": d, "k_or_chi": k, "value": frac_str(v)}
                         for (d, k), v in sorted(getattr(t, side).items())]
                  for side in SIDES})


@_malformed_as_contract_error
def table_from_json(text: str) -> InvariantTable:
    obj = json.loads(text)
    if not isinstance(obj, dict):
        raise ContractError("table JSON must be an object")
    return InvariantTable(**{side: {(int(e["d"]), int(e["k_or_chi"])): parse_frac(e["value"])
                                    for e in obj.get(side, [])} for side in SIDES})


# --- reports ---------------------------------------------------------------

def _plain(v):
    return frac_str(v) if isinstance(v, Fraction) else v


def reports_to_json(reports: List[CheckReport]) -> str:
    return _dump({
        "passed": all(r.passed for r in reports),
        "checks": [{"name": r.name,
                    "params": {k: _plain(v) for k, v in r.params},
                    "passed": r.passed,
                    "comparisons": [{"label": c.label,
                                     "expected": _plain(c.expected),
                                     "actual": _plain(c.actual),
                                     "ok": c.ok} for c in r.comparisons],
                    "notes": {k: _plain(v) for k, v in r.notes}} for r in reports],
    })
