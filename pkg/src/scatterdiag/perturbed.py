"""Perturbation oracle for local completion.

Every ray is split into square-zero monomial pieces (t = u_1 + ... + u_N),
the pieces are translated by generic rational offsets, and crossings are
resolved one at a time by elementary scattering: two pieces
``c_a z^{m_a} u_A`` and ``c_b z^{m_b} u_B`` with disjoint A, B emit a piece
``|det(m_a, m_b)| c_a c_b z^{m_a+m_b} u_{A+B}`` in direction
``-(m_a + m_b)``.  Parallel rays are merged back at the end.

This path shares no code with the order-by-order engine beyond the series
container and the splitting map.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from gmpy2 import mpq

from .algebra import (ContractError, GradedSeries, Vec, merge_monomial_components,
                      primitive, split_monomial_components, vneg)
from .local import LocalDiagram, LocalRay, normalize

Point = Tuple[Fraction, Fraction]


class PerturbationCollision(RuntimeError):
    """Three or more perturbed rays met at a point in every attempted draw."""


@dataclass
class _Piece:
    base: Point
    direction: Vec
    infinite: bool          # True for a full line (ingoing pieces)
    exponent: Vec
    support: frozenset
    coeff: Fraction


def _crossing(p: _Piece, q: _Piece):
    """Parameters (s, u, point) of the crossing of two pieces, or None."""
    (dx1, dy1), (dx2, dy2) = p.direction, q.direction
    den = dx1 * dy2 - dy1 * dx2
    if den == 0:
        return None
    rx, ry = q.base[0] - p.base[0], q.base[1] - p.base[1]
    s = (rx * dy2 - ry * dx2) / den
    u = (rx * dy1 - ry * dx1) / den
    if not p.infinite and s <= 0:
        return None
    if not q.infinite and u <= 0:
        return None
    return s, u, (p.base[0] + s * dx1, p.base[1] + s * dy1)


def _line_key(p: _Piece):
    # pieces built from the same u-subset share direction and moment, hence
    # lie on one line; they never multiply, so they count as a single line
    moment = p.direction[0] * p.base[1] - p.direction[1] * p.base[0]
    return (p.direction, moment, p.support)


def _has_free_triple(supports: List[frozenset]) -> bool:
    # three lines with pairwise disjoint u-supports meeting at one point give
    # a non-elementary scattering; anything else is a sum of elementary ones
    n = len(supports)
    for a in range(n):
        for b in range(a + 1, n):
            if supports[a] & supports[b]:
                continue
            for c in range(b + 1, n):
                if not (supports[c] & supports[a]) and not (supports[c] & supports[b]):
                    return True
    return False


def _rand_frac(rng: random.Random):
    # coordinates use GMP rationals: the crossing arithmetic dominates the run time
    return mpq(rng.randint(-10**6, 10**6), 10**6 + rng.randint(1, 997))


def _initial_pieces(d: LocalDiagram, nvars: int, rng: random.Random) -> List[_Piece]:
    pieces = []
    for ray in d.rays:
        if not ray.function:
            continue
        if any(isinstance(o, int) for _, o in ray.function.terms):
            parts = split_monomial_components(ray.function, nvars)
        else:
            parts = [GradedSeries({k: c}, d.truncation) for k, c in ray.function.items()]
        for part in parts:
            ((m, s), c), = part.terms.items()
            a, b = ray.direction
            if ray.outgoing:
                base = (_rand_frac(rng), _rand_frac(rng))
            else:
                eps = _rand_frac(rng)
                base = (-b * eps, a * eps)
            pieces.append(_Piece(base, ray.direction, not ray.outgoing, m, s, c))
    return pieces


def _run(pieces: List[_Piece], nvars: int, form: int) -> Optional[List[_Piece]]:
    # Only pairs with disjoint u-supports whose union fits in nvars interact;
    # a non-elementary point needs three pairwise interacting lines, so
    # crossings of other pairs are never recorded.
    through: Dict[Point, dict] = defaultdict(dict)
    by_support: Dict[frozenset, List[int]] = defaultdict(list)
    queue = list(range(len(pieces)))
    while queue:
        i = queue.pop(0)
        q = pieces[i]
        room = nvars - len(q.support)
        for sup_j, members in list(by_support.items()):
            if len(sup_j) > room or sup_j & q.support:
                continue
            for j in members:
                p = pieces[j]
                cr = _crossing(p, q)
                if cr is None:
                    continue
                pt = cr[2]
                lines = through[pt]
                lines[_line_key(p)] = p.support
                lines[_line_key(q)] = q.support
                if len(lines) > 2 and _has_free_triple(list(lines.values())):
                    return None
                dt = p.exponent[0] * q.exponent[1] - p.exponent[1] * q.exponent[0]
                m = (p.exponent[0] + q.exponent[0], p.exponent[1] + q.exponent[1])
                coeff = form * abs(dt) * p.coeff * q.coeff
                pieces.append(_Piece(pt, vneg(primitive(m)), False, m,
                                     p.support | q.support, coeff))
                queue.append(len(pieces) - 1)
        by_support[q.support].append(i)
    return pieces


def complete_local_perturbed(d: LocalDiagram, seed: int = 0, max_redraws: int = 20) -> LocalDiagram:
    """Independent completion via generic perturbation and elementary scatterings."""
    uses_t = any(isinstance(o, int) for r in d.rays for _, o in r.function.terms)
    nvars = d.truncation
    rng = random.Random(seed)
    for _ in range(max_redraws):
        result = _run(_initial_pieces(d, nvars, rng), nvars, d.form)
        if result is not None:
            break
    else:
        raise PerturbationCollision(
            f"concurrent perturbed rays after {max_redraws} draws")
    by_dir: Dict[Vec, Dict] = defaultdict(dict)
    for piece in result:
        acc = by_dir[piece.direction]
        key = (piece.exponent, piece.support)
        acc[key] = acc.get(key, 0) + piece.coeff
    out = [r for r in d.rays if not r.outgoing]
    for direction in sorted(by_dir):
        series = GradedSeries(by_dir[direction], d.truncation)
        if uses_t:
            series = merge_monomial_components([series], nvars, d.truncation)
        if series:
            out.append(LocalRay(direction, True, series))
    return LocalDiagram(tuple(normalize(out)), d.truncation, d.form)
