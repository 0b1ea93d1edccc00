"""Deterministic SVG drawing of a global diagram inside its window."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Tuple

from .globalscatter import GlobalDiagram, GlobalRay
from .sources import in_u

SCALE = 100          # pixels per unit
MARGIN = 10
PARABOLA_SAMPLES = 200


def _clip(r: GlobalRay, w) -> Optional[Tuple[Fraction, Fraction]]:
    """Parameter interval of base + s * dir (s >= 0) inside the window."""
    lo, hi = Fraction(0), None
    for p, v, a, b in ((r.base[0], r.direction[0], w.x_min, w.x_max),
                       (r.base[1], r.direction[1], w.y_min, w.y_max)):
        if v == 0:
            if not a <= p <= b:
                return None
            continue
        s1, s2 = (a - p) / v, (b - p) / v
        if s1 > s2:
            s1, s2 = s2, s1
        lo = max(lo, s1)
        hi = s2 if hi is None else min(hi, s2)
    if hi is None or lo > hi:
        return None
    return lo, hi


def _fmt(v) -> str:
    return f"{float(v):.3f}"


def _stroke_width(min_degree: int) -> str:
    return _fmt(Fraction(12, 5) / min_degree)


def svg_text(d: GlobalDiagram) -> str:
    w = d.window
    width = (w.x_max - w.x_min) * SCALE + 2 * MARGIN
    height = (w.y_max - w.y_min) * SCALE + 2 * MARGIN

    def px(x, y):
        return (_fmt((x - w.x_min) * SCALE + MARGIN), _fmt((w.y_max - y) * SCALE + MARGIN))

    lines: List[str] = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" fill="white"/>',
    ]
    pts = []
    for i in range(PARABOLA_SAMPLES + 1):
        x = w.x_min + (w.x_max - w.x_min) * Fraction(i, PARABOLA_SAMPLES)
        y = -x * x / 2
        if w.y_min <= y <= w.y_max:
            pts.append("%s,%s" % px(x, y))
    if len(pts) > 1:
        lines.append(f'<polyline class="parabola" fill="none" stroke="black" '
                     f'stroke-width="1.000" points="{" ".join(pts)}"/>')
    for r in d.rays:
        seg = _clip(r, w)
        if seg is None or not r.function:
            continue
        (x1, y1) = px(r.base[0] + seg[0] * r.direction[0], r.base[1] + seg[0] * r.direction[1])
        (x2, y2) = px(r.base[0] + seg[1] * r.direction[0], r.base[1] + seg[1] * r.direction[1])
        # rays born at a crossing lie in U; initial rays start on the parabola
        generated = in_u(*r.base)
        style = ('class="generated" stroke="#c0392b"' if generated
                 else 'class="initial" stroke="#1f4e9c" stroke-dasharray="6,3"')
        lines.append(f'<line {style} stroke-width="{_stroke_width(r.function.min_degree())}" '
                     f'x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_svg(d: GlobalDiagram, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg_text(d))
