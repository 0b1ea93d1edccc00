"""Local scattering diagrams at a point and their consistent completion."""

from __future__ import annotations

import functools
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import (ContractError, GradedSeries, Vec, degree, is_primitive, primitive,
                      vneg)
from .flow import graded_decompose, ordered_defect, path_ordered_product, GroupElement


@dataclass(frozen=True)
class LocalRay:
    """A ray through the origin.

    ``direction`` is the primitive direction of travel: an outgoing ray has
    support ``R>=0 * direction``, an ingoing ray has support
    ``R>=0 * (-direction)`` and points towards the origin.  Every exponent of
    ``function`` is a positive multiple of ``-direction``.
    """

    direction: Vec
    outgoing: bool
    function: GradedSeries

    def __post_init__(self):
        if not is_primitive(self.direction):
            raise ContractError(f"direction {self.direction} is not primitive")
        a, b = self.direction
        for m in self.function.exponents():
            # m = -lambda * direction with lambda > 0
            if m[0] * b - m[1] * a != 0 or m[0] * a + m[1] * b >= 0:
                raise ContractError(
                    f"exponent {m} is not negatively collinear with {self.direction}")

    @property
    def support(self) -> Vec:
        return self.direction if self.outgoing else vneg(self.direction)

    @property
    def sign(self) -> int:
        return 1 if self.outgoing else -1


@dataclass(frozen=True)
class LocalDiagram:
    rays: Tuple[LocalRay, ...]
    truncation: int
    form: int = 1

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(self.rays))
        for r in self.rays:
            if r.function.truncation != self.truncation:
                raise ContractError("ray truncation differs from diagram truncation")

    def normalized(self) -> "LocalDiagram":
        return LocalDiagram(tuple(normalize(self.rays)), self.truncation, self.form)

    def ingoing(self) -> List[LocalRay]:
        return [r for r in self.rays if not r.outgoing]

    def outgoing_map(self) -> Dict[Vec, GradedSeries]:
        return {r.direction: r.function for r in normalize(self.rays) if r.outgoing}


def _half(v: Vec) -> int:
    # angles in (-pi, pi]: lower half-plane first, then [0, pi]
    x, y = v
    if y < 0:
        return 0
    if y == 0:
        return 1 if x > 0 else 3
    return 2


def angle_cmp(u: Vec, v: Vec) -> int:
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    c = u[0] * v[1] - u[1] * v[0]
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


angle_key = functools.cmp_to_key(angle_cmp)


def normalize(rays: Sequence[LocalRay]) -> List[LocalRay]:
    """Merge rays with the same support and orientation; drop empty rays; sort."""
    acc: Dict[Tuple[Vec, bool], GradedSeries] = {}
    for r in rays:
        key = (r.direction, r.outgoing)
        acc[key] = acc[key] + r.function if key in acc else r.function
    out = [LocalRay(d, o, f) for (d, o), f in acc.items() if f]
    return sort_rays(out)


def sort_rays(rays: Sequence[LocalRay]) -> List[LocalRay]:
    """Anticlockwise order of supports, ingoing before outgoing on ties."""
    return sorted(rays, key=lambda r: (angle_key(primitive(r.support)), r.outgoing))


def ordered_factors(rays: Sequence[LocalRay]) -> List[Tuple[GradedSeries, int]]:
    return [(r.function, r.sign) for r in sort_rays(rays)]


def is_consistent_local(d: LocalDiagram) -> bool:
    if not d.rays:
        return True
    g = path_ordered_product(ordered_factors(d.rays), d.truncation, d.form)
    return g.is_identity()


def _added_rays(rays: Sequence[LocalRay], k: int, truncation: int, form: int) -> List[LocalRay]:
    defect = ordered_defect(ordered_factors(rays), k, form)
    if not defect:
        return []
    out = []
    for m0, g in graded_decompose(GroupElement(-defect)):
        out.append(LocalRay(vneg(m0), True, g.with_truncation(truncation)))
    return out


def completion_step(rays: Sequence[LocalRay], k: int, truncation: int,
                    form: int = 1) -> List[LocalRay]:
    """Outgoing rays to add so that ``rays`` become consistent modulo degree k+1."""
    return _added_rays(rays, k, truncation, form)


def complete_local(d: LocalDiagram, rng: Optional[random.Random] = None) -> LocalDiagram:
    """Consistent completion S(D): add outgoing rays degree by degree.

    ``rng`` shuffles the insertion order of the rays added at each degree; the
    result does not depend on it.
    """
    rays = list(d.rays)
    for k in range(1, d.truncation + 1):
        new = _added_rays(rays, k, d.truncation, d.form)
        if rng is not None:
            rng.shuffle(new)
        rays = normalize(rays + new)
    return LocalDiagram(tuple(normalize(rays)), d.truncation, d.form)


def added_rays(original: LocalDiagram, completed: LocalDiagram) -> Dict[Vec, GradedSeries]:
    """Outgoing functions present in ``completed`` beyond those in ``original``.

    An ingoing ray counts as a full line through the origin, so its straight
    continuation is not reported as new.
    """
    before: Dict[Vec, GradedSeries] = {}
    for r in normalize(original.rays):
        before[r.direction] = before[r.direction] + r.function if r.direction in before \
            else r.function
    out = {}
    for direction, f in completed.outgoing_map().items():
        diff = f - before[direction] if direction in before else f
        if diff:
            out[direction] = diff
    return out
