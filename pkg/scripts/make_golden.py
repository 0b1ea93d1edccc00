"""Regenerate the frozen fixtures in tests/data.

Run only when an output format changes on purpose; the I/O tests compare
fresh output byte for byte against these files.
"""

from fractions import Fraction as F
from pathlib import Path

from scatterdiag.algebra import GradedSeries, vneg
from scatterdiag.globalscatter import complete_global
from scatterdiag.invariants import run_invariants
from scatterdiag.local import LocalDiagram, LocalRay, complete_local
from scatterdiag.render import svg_text
from scatterdiag.serialize import global_to_json, local_to_json, table_to_csv, table_to_json
from scatterdiag.sources import Window, build_p2e_initial

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
FIGURE_WINDOW = Window(F(-1, 2), F(5, 2), F(-1, 8), F(4))


def two_ray() -> LocalDiagram:
    h1 = GradedSeries.monomial((1, 0), frozenset({1}), 1, 2)
    h2 = GradedSeries.monomial((0, 1), frozenset({2}), 1, 2)
    return LocalDiagram((LocalRay(vneg((1, 0)), False, h1), LocalRay(vneg((0, 1)), False, h2)), 2)


def write(name: str, text: str) -> None:
    (DATA / name).write_text(text, encoding="utf-8", newline="\n")
    print("wrote", name)


def main() -> None:
    DATA.mkdir(exist_ok=True)
    d = two_ray()
    write("two_ray_input.json", local_to_json(d))
    write("two_ray_completed.json", local_to_json(complete_local(d)))
    for n in (1, 3):
        g = complete_global(build_p2e_initial(FIGURE_WINDOW, n), workers=1)
        write(f"p2e_order{n}.json", global_to_json(g))
        write(f"p2e_order{n}.svg", svg_text(g))
    table = run_invariants(2, workers=1).table
    csv_text = table_to_csv(table)
    write("degree2_table.csv", csv_text)
    write("degree2_table.json", table_to_json(table))
    # a single flipped sign breaks the d = 2 identities
    write("corrupted_table.csv", csv_text.replace("bps,2,1,-1", "bps,2,1,1"))


if __name__ == "__main__":
    main()
