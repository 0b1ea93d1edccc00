"""Initial data: the two-ray GPS diagram and the two initial diagrams on U.

Coordinates on U = {y > -x^2/2}.  The singular points sit at (n, -n^2/2) and
the initial rays run along the tangent lines y = -n x + n^2/2.  The tangent
half-line of direction (-1, n) carries the charge of O(n); its exponent is
(1, -n), so a term ``z^(a,b)`` on any ray stands for the charge
``(r, d) = (a, -b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple

from .algebra import ContractError, GradedSeries, Vec, det, is_primitive, primitive, vneg
from .local import LocalDiagram, LocalRay

# Skew form of the Euler pairing on P^2 in (r, d) coordinates:
# chi(a, b) - chi(b, a) = 3 (r_a d_b - r_b d_a).
P2_FORM = 3


class Charge(NamedTuple):
    r: int
    d: int
    chi: int

    def __neg__(self) -> "Charge":
        return Charge(-self.r, -self.d, -self.chi)


@dataclass(frozen=True)
class CentralChargeValue:
    """Z = re + i * im_sign_factor * sqrt(im_radicand), kept exact."""
    re: Fraction
    im_sign_factor: Fraction
    im_radicand: Fraction

    def vanishes(self) -> bool:
        return self.re == 0 and (self.im_sign_factor == 0 or self.im_radicand == 0)


@dataclass(frozen=True)
class Window:
    x_min: Fraction
    x_max: Fraction
    y_min: Fraction
    y_max: Fraction

    def __post_init__(self):
        for name in ("x_min", "x_max", "y_min", "y_max"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ContractError("empty window")

    def contains(self, x: Fraction, y: Fraction) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def meets_u(self) -> bool:
        # highest point of the window vs lowest point of the parabola over it
        xs = [self.x_min, self.x_max]
        if self.x_min <= 0 <= self.x_max:
            xs.append(Fraction(0))
        return any(self.y_max > -x * x / 2 for x in xs)

    def enlarged(self, dx, dy) -> "Window":
        return Window(self.x_min - dx, self.x_max + dx, self.y_min - dy, self.y_max + dy)

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.x_min, self.x_max, self.y_min, self.y_max)


def in_closure_u(x, y) -> bool:
    return Fraction(y) >= -Fraction(x) ** 2 / 2


def in_u(x, y) -> bool:
    return Fraction(y) > -Fraction(x) ** 2 / 2


def chern_of_line_bundle(n: int) -> Charge:
    return Charge(1, n, (n + 1) * (n + 2) // 2)


def central_charge(g: Charge, x, y) -> CentralChargeValue:
    x, y = Fraction(x), Fraction(y)
    if not in_closure_u(x, y):
        raise ContractError(f"({x}, {y}) lies below the parabola y = -x^2/2")
    r, d, chi = g
    twice_re = 2 * r * y + 2 * d * x + 2 * r + 3 * d - 2 * chi
    return CentralChargeValue(twice_re / 2, d - r * x, x * x + 2 * y)


def charge_at(m: Vec, x, y) -> Tuple[int, int, Fraction]:
    """Charge (r, d, chi) of a term z^m on a ray through (x, y)."""
    r, d = m[0], -m[1]
    x, y = Fraction(x), Fraction(y)
    return (r, d, r * y + d * x + r + Fraction(3 * d, 2))


def li2_series(m: Vec, n: int) -> GradedSeries:
    """sum_{k<=n} (-1)^(k-1)/k^2 z^(k m) t^k."""
    return GradedSeries({((k * m[0], k * m[1]), k): Fraction((-1) ** (k - 1), k * k)
                         for k in range(1, n + 1)}, n)


def build_gps_diagram(m1: Vec, m2: Vec, n: int) -> LocalDiagram:
    if n < 1:
        raise ContractError("order must be >= 1")
    if not (is_primitive(m1) and is_primitive(m2)):
        raise ContractError("m1 and m2 must be primitive")
    if det(m1, m2) == 0:
        raise ContractError("m1 and m2 must not be parallel")
    return LocalDiagram((LocalRay(vneg(m1), False, li2_series(m1, n)),
                         LocalRay(vneg(m2), False, li2_series(m2, n))), n)


def tangent_meets_window(n: int, w: Window) -> bool:
    ys = [-n * x + Fraction(n * n, 2) for x in (w.x_min, w.x_max)]
    return min(ys) <= w.y_max and max(ys) >= w.y_min


def tangent_indices(w: Window) -> List[int]:
    """Integers n whose tangent line meets the window (finite scan)."""
    xmax = max(abs(w.x_min), abs(w.x_max))
    bound = int(2 * xmax + math.isqrt(int(2 * abs(w.y_max)) + 1)) + 3
    return [n for n in range(-bound, bound + 1) if tangent_meets_window(n, w)]


def _check_window(w: Window) -> None:
    if not w.meets_u():
        raise ContractError("window does not meet U")


def build_p2e_initial(w: Window, n: int, form: int = P2_FORM):
    """Tangent rays at (n, -n^2/2) with functions sum (-1)^(k-1)/k^2 z^(k m) t^k."""
    from .globalscatter import GlobalDiagram, GlobalRay

    _check_window(w)
    rays = []
    for i in tangent_indices(w):
        base = (Fraction(i), Fraction(-i * i, 2))
        for direction in ((1, -i), (-1, i)):
            rays.append(GlobalRay(base, direction, li2_series(vneg(direction), n)))
    return GlobalDiagram(tuple(rays), w, n, form)


def _re_zero_line(g: Charge):
    """Point where Z_g vanishes and direction (-r, d) of {Re Z_g = 0}."""
    r, d, chi = g
    x = Fraction(d, r)                         # imaginary factor d - r x = 0
    y = (chi - d * x - r - Fraction(3 * d, 2)) / r
    return (x, y), (-r, d)


def sheaf_indices(w: Window) -> List[int]:
    """Line bundles O(n) whose wall {Re Z = 0} meets the window."""
    out = []
    xmax = max(abs(w.x_min), abs(w.x_max))
    bound = int(2 * xmax + math.isqrt(int(2 * abs(w.y_max)) + 1)) + 3
    for n in range(-bound, bound + 1):
        g = chern_of_line_bundle(n)
        # Re Z = r y + d x + r + 3d/2 - chi, solved for y at the window edges
        ys = [(g.chi - g.d * x - g.r - Fraction(3 * g.d, 2)) / g.r for x in (w.x_min, w.x_max)]
        if min(ys) <= w.y_max and max(ys) >= w.y_min:
            out.append(n)
    return out


def build_sheaf_initial(w: Window, n: int, form: int = P2_FORM):
    """Walls Re Z_{O(n)} = 0 split where Z vanishes; halves carry +/- gamma(O(n))."""
    from .globalscatter import GlobalDiagram, GlobalRay

    _check_window(w)
    rays = []
    for i in sheaf_indices(w):
        g = chern_of_line_bundle(i)
        base, direction = _re_zero_line(g)
        for sign, charge in ((1, g), (-1, -g)):
            dvec = (sign * direction[0], sign * direction[1])
            # a term z^(kr, -kd) carries charge k * (r, d)
            m = (charge.r, -charge.d)
            rays.append(GlobalRay(base, dvec, li2_series(m, n), charge))
    return GlobalDiagram(tuple(rays), w, n, form)


def gps_table(m1: Vec, m2: Vec, n: int) -> dict:
    """N^{ka,kb}_{m1,m2}: coefficient of z^{k(a m1 + b m2)} t^{k(a+b)} on the ray -(a m1 + b m2)."""
    from .local import complete_local

    out_map = complete_local(build_gps_diagram(m1, m2, n)).outgoing_map()
    table = {}
    for s in range(2, n + 1):
        for a in range(1, s):
            b = s - a
            if math.gcd(a, b) != 1:
                continue
            m = (a * m1[0] + b * m2[0], a * m1[1] + b * m2[1])
            f = out_map.get(vneg(primitive(m)))
            for k in range(1, n // s + 1):
                c = f.coeff((k * m[0], k * m[1]), k * s) if f is not None else 0
                table[(a, b, k)] = Fraction(c)
    return table
