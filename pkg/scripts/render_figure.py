"""Draw the completed plane diagram at a range of orders, one SVG per order.

    python scripts/render_figure.py --max-order 4 --out figures/
"""

import argparse
import time
from fractions import Fraction as F
from pathlib import Path

from scatterdiag.globalscatter import complete_global
from scatterdiag.render import render_svg
from scatterdiag.sources import Window, build_p2e_initial


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-order", type=int, default=4)
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()

    window = Window(F(-1, 2), F(5, 2), F(-1, 8), F(4))
    args.out.mkdir(parents=True, exist_ok=True)
    for n in range(1, args.max_order + 1):
        t0 = time.perf_counter()
        d = complete_global(build_p2e_initial(window, n), workers=args.workers)
        path = args.out / f"p2e_order{n}.svg"
        render_svg(d, path)
        print(f"order {n}: {len(d.rays)} rays, {time.perf_counter() - t0:.1f}s -> {path}")


if __name__ == "__main__":
    main()
