"""Consistent completion of a scattering diagram on a window of U.

Every ray is stored as outgoing from its base point; a term ``z^m`` of a ray
of direction ``v`` has ``m`` a positive multiple of ``-v``.  At a point p in
the window, a ray based at p contributes an outgoing local ray, and a ray
passing through p contributes both an ingoing and an outgoing local ray.

Completion runs degree by degree.  At degree k only rays with terms of degree
< k can produce a degree-k defect, and rays added at degree k commute with
everything modulo degree k+1, so one sweep over the crossing points per
degree is enough.  Defects at different points are computed from the same
snapshot, which makes the result independent of the processing schedule.
"""

from __future__ import annotations

import os
import random
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import ContractError, GradedSeries, Vec, is_primitive, zero
from .local import LocalRay, completion_step
from .sources import Window, in_closure_u, in_u

Point = Tuple[Fraction, Fraction]
RayKey = Tuple[Point, Vec]

THREADS_ENV = "SCATTERDIAG_THREADS"


@dataclass(frozen=True)
class GlobalRay:
    base: Point
    direction: Vec
    function: GradedSeries
    charge: Optional[Tuple[int, int, int]] = None

    def __post_init__(self):
        object.__setattr__(self, "base", (Fraction(self.base[0]), Fraction(self.base[1])))
        object.__setattr__(self, "direction", (int(self.direction[0]), int(self.direction[1])))
        if self.charge is not None:
            object.__setattr__(self, "charge", tuple(int(c) for c in self.charge))
        if not is_primitive(self.direction):
            raise ContractError(f"direction {self.direction} is not primitive")
        a, b = self.direction
        for m in self.function.exponents():
            if m[0] * b - m[1] * a != 0 or m[0] * a + m[1] * b >= 0:
                raise ContractError(f"exponent {m} is not a positive multiple of -{self.direction}")

    @property
    def key(self) -> RayKey:
        return (self.base, self.direction)

    def contains(self, p: Point) -> bool:
        dx, dy = p[0] - self.base[0], p[1] - self.base[1]
        a, b = self.direction
        return dx * b - dy * a == 0 and dx * a + dy * b >= 0


@dataclass(frozen=True)
class GlobalDiagram:
    rays: Tuple[GlobalRay, ...]
    window: Window
    truncation: int
    form: int = 1

    def __post_init__(self):
        for r in self.rays:
            if not in_closure_u(*r.base):
                raise ContractError(f"base point {r.base} lies below the parabola")
            if r.function.truncation != self.truncation:
                raise ContractError("ray truncation differs from diagram truncation")
        object.__setattr__(self, "rays", tuple(sorted(self.rays, key=_ray_sort_key)))

    def functions(self) -> Dict[RayKey, GradedSeries]:
        return {r.key: r.function for r in self.rays}

    def same_rays(self, other: "GlobalDiagram") -> bool:
        """Equality of supports and functions, ignoring charge annotations."""
        return (self.truncation == other.truncation
                and self.functions() == other.functions())


def _ray_sort_key(r: GlobalRay):
    return (r.base, r.direction)


def _crossing(r1: GlobalRay, r2: GlobalRay) -> Optional[Point]:
    (a1, b1), (a2, b2) = r1.direction, r2.direction
    den = a1 * b2 - b1 * a2
    if den == 0:
        return None
    rx, ry = r2.base[0] - r1.base[0], r2.base[1] - r1.base[1]
    s = (rx * b2 - ry * a2) / den
    if s < 0:
        return None
    u = (rx * b1 - ry * a1) / den
    if u < 0:
        return None
    return (r1.base[0] + s * a1, r1.base[1] + s * b1)


def _min_degree(r: GlobalRay) -> float:
    return r.function.min_degree() if r.function else float("inf")


def _local_rays(p: Point, rays: Iterable[GlobalRay], k: int) -> List[LocalRay]:
    out = []
    for r in rays:
        f = r.function
        if r.base != p:
            out.append(LocalRay(r.direction, False, f))
        out.append(LocalRay(r.direction, True, f))
    return out


def _defect_task(args):
    p, rays, k, truncation, form = args
    added = completion_step(_local_rays(p, rays, k), k, truncation, form)
    return p, [(lr.direction, lr.function) for lr in added]


class _Engine:
    def __init__(self, d: GlobalDiagram):
        self.window = d.window
        self.truncation = d.truncation
        self.form = d.form
        self.rays: Dict[RayKey, GlobalRay] = {}
        self.points: Dict[Point, set] = defaultdict(set)
        for r in d.rays:
            self._insert(r)

    def _admissible(self, p: Point) -> bool:
        return self.window.contains(*p) and in_u(*p)

    def _insert(self, r: GlobalRay) -> None:
        old = self.rays.get(r.key)
        if old is not None:
            self.rays[r.key] = GlobalRay(r.base, r.direction, old.function + r.function,
                                         old.charge if old.charge is not None else r.charge)
            return
        # A pair whose lowest degrees already exceed N cannot interact below
        # the truncation, not even inside nested brackets with a third ray.
        room = self.truncation - _min_degree(r)
        if self._admissible(r.base):
            # corrections belong to the point they were created at
            self.points[r.base].add(r.key)
        for other in self.rays.values():
            if _min_degree(other) > room:
                continue
            p = _crossing(r, other)
            if p is not None and self._admissible(p):
                pts = self.points[p]
                pts.add(r.key)
                pts.add(other.key)
        self.rays[r.key] = r

    def tasks(self, k: int) -> List[tuple]:
        out = []
        for p in sorted(self.points):
            members = [self.rays[key] for key in sorted(self.points[p])]
            active = [r for r in members if r.function and r.function.min_degree() <= k - 1]
            if len(active) < 2:
                continue
            degs = sorted(r.function.min_degree() for r in active)
            if degs[0] + degs[1] > k:
                continue
            out.append((p, tuple(active), k, self.truncation, self.form))
        return out

    def run(self, workers: int = 1, rng: Optional[random.Random] = None,
            progress=None) -> None:
        for k in range(1, self.truncation + 1):
            tasks = self.tasks(k)
            if rng is not None:
                rng.shuffle(tasks)
            if workers > 1 and len(tasks) > 1:
                with ProcessPoolExecutor(max_workers=workers) as ex:
                    results = list(ex.map(_defect_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
            else:
                results = [_defect_task(t) for t in tasks]
            new = []
            for p, added in results:
                for direction, f in added:
                    new.append(GlobalRay(p, direction, f))
            new.sort(key=_ray_sort_key)
            for r in new:
                self._insert(r)
            if progress is not None:
                progress(k, len(tasks), len(new), len(self.rays))

    def diagram(self) -> GlobalDiagram:
        return GlobalDiagram(tuple(self.rays.values()), self.window, self.truncation, self.form)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def complete_global(d: GlobalDiagram, workers: Optional[int] = None,
                    rng: Optional[random.Random] = None, progress=None) -> GlobalDiagram:
    """Consistent completion inside the window, up to the diagram's truncation."""
    if not d.window.meets_u():
        raise ContractError("window does not meet U")
    eng = _Engine(d)
    eng.run(default_workers() if workers is None else workers, rng, progress)
    return eng.diagram()


def inconsistent_points(d: GlobalDiagram) -> List[Point]:
    """Points in the window whose local diagram is inconsistent at full truncation."""
    from .local import LocalDiagram, is_consistent_local

    eng = _Engine(d)
    bad = []
    for p in sorted(eng.points):
        members = [eng.rays[key] for key in sorted(eng.points[p])]
        ld = LocalDiagram(tuple(_local_rays(p, members, d.truncation)), d.truncation, d.form)
        if not is_consistent_local(ld):
            bad.append(p)
    return bad


def rays_through(d: GlobalDiagram, p: Point) -> List[Tuple[Vec, GradedSeries]]:
    """Functions of all rays whose support contains p, merged by direction."""
    p = (Fraction(p[0]), Fraction(p[1]))
    acc: Dict[Vec, GradedSeries] = {}
    for r in d.rays:
        if r.contains(p):
            acc[r.direction] = acc[r.direction] + r.function if r.direction in acc else r.function
    return sorted(acc.items())


def vertical_function(d: GlobalDiagram, x0) -> GradedSeries:
    """Merged function of the upward vertical rays on the line x = x0."""
    x0 = Fraction(x0)
    if not d.window.x_min <= x0 <= d.window.x_max:
        raise ContractError(f"x0 = {x0} lies outside the window")
    total = zero(d.truncation)
    for r in d.rays:
        if r.direction == (0, 1) and r.base[0] == x0 and r.base[1] <= d.window.y_max:
            total = total + r.function
    return total


def ray_functions_at(d: GlobalDiagram, p=None, x0=None):
    if (p is None) == (x0 is None):
        raise ContractError("give exactly one of a point or a vertical asymptote")
    if p is not None:
        return rays_through(d, p)
    f = vertical_function(d, x0)
    return [((0, 1), f)] if f else []
