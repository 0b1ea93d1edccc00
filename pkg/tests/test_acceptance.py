"""Acceptance criteria 1-12, all compared exactly (tolerance zero).

Each test prints one ``criterion N: PASS|FAIL`` line.  Running this file
directly (``python tests/test_acceptance.py``) prints the same lines without
pytest.  The degree-4 criterion takes about half a minute and runs unless
SCATTERDIAG_STRETCH=0.
"""

import os
import random
import subprocess
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import DATA, two_ray_diagram, random_local_diagram  # noqa: E402
from scatterdiag.algebra import bracket  # noqa: E402
from scatterdiag.globalscatter import complete_global  # noqa: E402
from scatterdiag.invariants import (check_chi_independence, check_correspondence,  # noqa: E402
                                    check_takahashi, run_invariants, sheaf_omega,
                                    stability_reports)
from scatterdiag.local import added_rays, complete_local, is_consistent_local  # noqa: E402
from scatterdiag.perturbed import complete_local_perturbed  # noqa: E402
from scatterdiag.render import svg_text  # noqa: E402
from scatterdiag.serialize import global_to_json, local_from_json, local_to_json  # noqa: E402
from scatterdiag.sources import (Window, build_gps_diagram, build_p2e_initial,  # noqa: E402
                                 build_sheaf_initial, central_charge, chern_of_line_bundle,
                                 gps_table)

FIG = Window(F(-1, 2), F(5, 2), F(-1, 8), F(4))
STRETCH = os.environ.get("SCATTERDIAG_STRETCH", "1") != "0"

_cache = {}


def pipeline(D):
    if D not in _cache:
        _cache[D] = run_invariants(D)
    return _cache[D]


def _all(reports):
    bad = [r.summary() for r in reports if not r.passed]
    return not bad, "; ".join(bad) or f"{len(reports)} reports passed"


# --- criteria: each returns (passed, detail) -------------------------------

def criterion_1():
    t0 = time.perf_counter()
    d = two_ray_diagram()
    s = complete_local(d)
    h1, h2 = (r.function for r in d.rays)
    elapsed = time.perf_counter() - t0
    ok = added_rays(d, s) == {(-1, -1): bracket(h1, h2)} and is_consistent_local(s)
    return ok and elapsed < 1, f"one ray on (-1,-1), consistent, {elapsed:.3f}s"


def criterion_2():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    mismatches = 0
    for i in range(100):
        d = random_local_diagram(rng, rng.randint(1, 5), rng.randint(1, 4))
        mismatches += complete_local(d) != complete_local_perturbed(d, seed=i)
    elapsed = time.perf_counter() - t0
    return mismatches == 0 and elapsed < 60, f"{mismatches} mismatches in 100, {elapsed:.1f}s"


def criterion_3():
    rng = random.Random(7)
    ok = True
    for _ in range(5):
        d = random_local_diagram(rng, 4, rng.randint(2, 4))
        s = complete_local(d)
        ok &= complete_local(s) == s
        ok &= all(complete_local(d, rng=random.Random(k)) == s for k in range(10))
    return ok, "idempotent, 10 shuffles each on 5 diagrams"


def criterion_4():
    n11 = gps_table((1, 0), (0, 1), 2)[(1, 1, 1)]
    same = all(complete_local(build_gps_diagram((1, 0), (0, 1), n))
               == complete_local_perturbed(build_gps_diagram((1, 0), (0, 1), n)) for n in (4, 5))
    return n11 == 1 and same, f"N11 = {n11}, direct = perturbed at orders 4 and 5"


def criterion_5():
    windows = [FIG, Window(F(-1, 2), F(3, 2), F(-1, 8), F(2)), Window(F(-3), F(1), F(-2), F(2)),
               Window(F(1, 3), F(7, 3), F(-1), F(6)), Window(F(-5), F(5), F(-12), F(12))]
    same = all(build_p2e_initial(w, n).same_rays(build_sheaf_initial(w, n))
               for w in windows for n in range(1, 7))
    tangent = True
    for n in range(-20, 21):
        g = chern_of_line_bundle(n)
        tangent &= central_charge(g, F(n), F(-n * n, 2)).vanishes()
        for dx in (F(1, 3), F(-2, 5)):
            x = n + dx
            tangent &= central_charge(g, x, -x * x / 2).re == -dx * dx / 2
    return same and tangent, "5 windows x orders 1-6; tangency for |n| <= 20"


def criterion_6():
    t0 = time.perf_counter()
    res = pipeline(1)
    sheaf = [sheaf_omega(res.sheaf_data, 1, chi, res.signs) for chi in (0, 1, 2)]
    elapsed = time.perf_counter() - t0
    omega_e = res.table.bps[(1, 1)]
    ok = omega_e == 1 and sheaf == [3, 3, 3]
    shown = ", ".join(map(str, sheaf))
    return ok and elapsed < 60, f"Omega_E(1,1) = {omega_e}, Omega(1,chi) = {shown}, {elapsed:.1f}s"


def criterion_7():
    t = pipeline(2).table
    reports = [check_takahashi(t, 2), check_correspondence(t, 2, 0), check_correspondence(t, 2, 1)]
    values = t.sheaf[(2, 0)] == t.sheaf[(2, 1)] == -6
    ok, detail = _all(reports)
    return values and ok, f"Omega(2,0) = {t.sheaf[(2, 0)]}, Omega(2,1) = {t.sheaf[(2, 1)]}; {detail}"


def criterion_8():
    t = pipeline(3).table
    reports = [check_takahashi(t, 3), check_chi_independence(t, 3)]
    reports += [check_correspondence(t, 3, chi) for chi in range(3)]
    integral = all(v.denominator == 1 for v in list(t.bps.values()) + list(t.sheaf.values()))
    ok, detail = _all(reports)
    return ok and integral, f"common value {t.sheaf[(3, 0)]}, Omega_E(3,k) = {t.bps[(3, 1)]}; {detail}"


def criterion_9():
    t = pipeline(4).table
    ok, detail = _all([check_takahashi(t, 4), check_chi_independence(t, 4)]
                      + [check_correspondence(t, 4, chi) for chi in range(4)])
    return ok, f"Omega_E(4,k) = {t.bps[(4, 1)]}, Omega(4,chi) = {t.sheaf[(4, 0)]}; {detail}"


def criterion_10():
    return _all(stability_reports(pipeline(3)))


def criterion_11():
    base = build_p2e_initial(FIG, 4)
    ref = complete_global(base, workers=1)
    runs = [complete_global(base, workers=2)]
    runs += [complete_global(base, workers=1, rng=random.Random(k)) for k in range(3)]
    ok = all(global_to_json(r) == global_to_json(ref) for r in runs)
    return ok, f"{len(ref.rays)} rays; 2 workers and 3 shuffles identical"


def criterion_12():
    read = lambda name: (DATA / name).read_text(encoding="utf-8")  # noqa: E731
    d = complete_global(build_p2e_initial(FIG, 3), workers=1)
    golden = (global_to_json(d) == read("p2e_order3.json")
              and svg_text(d) == read("p2e_order3.svg")
              and local_to_json(complete_local(local_from_json(read("two_ray_input.json"))))
              == read("two_ray_completed.json"))
    cmd = [sys.executable, "-m", "scatterdiag", "check", "--table"]
    bad = subprocess.run(cmd + [str(DATA / "corrupted_table.csv")], capture_output=True)
    good = subprocess.run(cmd + [str(DATA / "degree2_table.csv")], capture_output=True)
    ok = golden and bad.returncode != 0 and good.returncode == 0
    return ok, f"golden files stable: {golden}; check exit codes {good.returncode}/{bad.returncode}"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 13)}


def report(n):
    if n == 9 and not STRETCH:
        return None, "skipped (SCATTERDIAG_STRETCH=0)"
    ok, detail = CRITERIA[n]()
    return bool(ok), detail


def line(n, ok, detail):
    status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    return f"criterion {n}: {status} ({detail})"


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n, capsys):
    ok, detail = report(n)
    with capsys.disabled():
        print("\n" + line(n, ok, detail))
    if ok is None:
        pytest.skip(detail)
    assert ok, detail


if __name__ == "__main__":
    results = [report(n) for n in CRITERIA]
    for n, (ok, detail) in zip(CRITERIA, results):
        print(line(n, ok, detail))
    sys.exit(0 if all(ok is not False for ok, _ in results) else 1)
