import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from conftest import DATA, two_ray_diagram, random_local_diagram, series
from scatterdiag.algebra import ContractError, GradedSeries
from scatterdiag.cli import RunConfig, config_from_args, main
from scatterdiag.globalscatter import GlobalDiagram, complete_global
from scatterdiag.local import added_rays, complete_local
from scatterdiag.render import svg_text
from scatterdiag.serialize import (global_from_json, global_to_json, local_from_json,
                                   local_to_json, series_json, series_parse, table_from_csv,
                                   table_from_json, table_to_csv, table_to_json)
from scatterdiag.sources import Window, build_p2e_initial, build_sheaf_initial

FIG = Window(F(-1, 2), F(5, 2), F(-1, 8), F(4))


def read(name):
    return (DATA / name).read_text(encoding="utf-8")


# --- round trips -----------------------------------------------------------

@settings(max_examples=50)
@given(series(truncation=4))
def test_series_round_trip(f):
    assert series_parse(series_json(f), 4) == f


@pytest.mark.parametrize("seed", range(5))
def test_local_round_trip_is_byte_stable(seed):
    d = complete_local(random_local_diagram(random.Random(seed), 3, 3))
    text = local_to_json(d)
    back = local_from_json(text)
    assert back == d
    assert local_to_json(back) == text


def test_square_zero_orders_survive_json():
    d = two_ray_diagram()
    assert local_from_json(local_to_json(d)) == d


def test_global_round_trip_keeps_charges():
    d = complete_global(build_p2e_initial(FIG, 2), workers=1)
    back = global_from_json(global_to_json(d))
    assert back == d and global_to_json(back) == global_to_json(d)


def test_table_round_trips():
    t = table_from_csv(read("degree2_table.csv"))
    assert table_to_csv(t) == read("degree2_table.csv")
    assert table_from_json(table_to_json(t)) == t
    assert table_to_json(t) == read("degree2_table.json")


@pytest.mark.parametrize("text", [
    "", "[]", '{"rays": []}', '{"truncation": 2, "rays": [{"dir": [1, 0]}]}',
    '{"truncation": 2, "rays": [{"dir": [1, 0], "orientation": "sideways", "function": []}]}',
])
def test_malformed_local_json_is_a_contract_error(text):
    with pytest.raises(ContractError):
        local_from_json(text)


@pytest.mark.parametrize("text", [
    "side,d,k_or_chi\n", "side,d,k_or_chi,value\nbps,1\n",
    "side,d,k_or_chi,value\nfoo,1,1,1\n", "side,d,k_or_chi,value\nbps,1,1,1/0\n",
])
def test_malformed_csv_is_a_contract_error(text):
    with pytest.raises(ContractError):
        table_from_csv(text)


def test_series_with_duplicate_terms_is_rejected():
    item = {"m": [1, 0], "order": 1, "coeff": "1/1"}
    with pytest.raises(ContractError):
        series_parse([item, item], 2)


# --- golden files ----------------------------------------------------------

def test_two_ray_golden():
    d = local_from_json(read("two_ray_input.json"))
    assert local_to_json(d) == read("two_ray_input.json")
    assert local_to_json(complete_local(d)) == read("two_ray_completed.json")


@pytest.mark.parametrize("n", [1, 3])
def test_p2e_golden(n):
    d = complete_global(build_p2e_initial(FIG, n), workers=1)
    assert global_to_json(d) == read(f"p2e_order{n}.json")
    assert svg_text(d) == read(f"p2e_order{n}.svg")


# --- SVG -------------------------------------------------------------------

def test_empty_diagram_draws_only_the_parabola():
    svg = svg_text(GlobalDiagram((), FIG, 1))
    assert svg.count("<polyline") == 1 and "<line" not in svg


@pytest.mark.parametrize("w", [Window(F(-1), F(1), F(-1, 2), F(1)), FIG])
def test_order_one_draws_only_initial_rays(w):
    svg = svg_text(complete_global(build_p2e_initial(w, 1)))
    assert 'class="initial"' in svg and 'class="generated"' not in svg


def test_higher_order_adds_generated_rays():
    low, high = read("p2e_order3.svg"), svg_text(complete_global(build_p2e_initial(FIG, 4)))
    assert high.count("<line") > low.count("<line")
    assert 'class="generated"' in low


def test_svg_is_independent_of_schedule_seed():
    a = complete_global(build_sheaf_initial(FIG, 3), rng=random.Random(1))
    b = complete_global(build_sheaf_initial(FIG, 3), rng=random.Random(2))
    assert svg_text(a) == svg_text(b)


def test_svg_is_well_formed_xml():
    import xml.etree.ElementTree as ET
    root = ET.fromstring(read("p2e_order3.svg").encode())
    assert root.tag.endswith("svg")


# --- CLI -------------------------------------------------------------------

def test_config_parsing():
    cfg = config_from_args(["p2e", "--order", "2", "--window=-1/2,3/2,-1/8,2", "--seed", "4"])
    assert cfg.truncation == 2 and cfg.seed == 4
    assert cfg.window == Window(F(-1, 2), F(3, 2), F(-1, 8), F(2))


@pytest.mark.parametrize("kwargs", [
    dict(command="p2e", truncation=2),
    dict(command="p2e", truncation=0, window=FIG),
    dict(command="gps"),
    dict(command="check"),
    dict(command="nope"),
    dict(command="p2e", truncation=2, window=Window(F(2), F(3), F(-20), F(-10))),
])
def test_invalid_configs_are_rejected(kwargs):
    with pytest.raises(ContractError):
        RunConfig(**kwargs)


def test_cli_local_adds_one_ray(tmp_path):
    out = tmp_path / "out.json"
    assert main(["local", "--input", str(DATA / "two_ray_input.json"), "--output", str(out)]) == 0
    new = added_rays(local_from_json(read("two_ray_input.json")), local_from_json(out.read_text()))
    assert new == {(-1, -1): GradedSeries({((1, 1), frozenset({1, 2})): 1}, 2)}
    assert out.read_text() == read("two_ray_completed.json")


def test_cli_gps(capsys):
    assert main(["gps", "--order", "2"]) == 0
    assert capsys.readouterr().out == "a,b,k,value\n1,1,1,1/1\n"


def test_cli_p2e_writes_json_and_svg(tmp_path):
    js, svg = tmp_path / "d.json", tmp_path / "d.svg"
    assert main(["p2e", "--order", "3", "--window=-1/2,5/2,-1/8,4",
                 "--output", str(js), "--svg", str(svg)]) == 0
    assert js.read_text() == read("p2e_order3.json")
    assert svg.read_text() == read("p2e_order3.svg")


def test_cli_check_on_stored_table(tmp_path):
    out = tmp_path / "report.json"
    assert main(["check", "--table", str(DATA / "degree2_table.csv"), "--output", str(out)]) == 0
    assert json.loads(out.read_text())["passed"] is True


def test_cli_check_fails_on_corrupted_fixture(tmp_path):
    out = tmp_path / "report.json"
    assert main(["check", "--table", str(DATA / "corrupted_table.csv"), "--output", str(out)]) == 1
    report = json.loads(out.read_text())
    assert report["passed"] is False
    assert {c["name"] for c in report["checks"] if not c["passed"]} >= {"takahashi"}


def test_cli_errors_have_distinct_codes(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("not,a,table\n")
    assert main(["check", "--table", str(bad)]) == 2
    assert main(["local", "--input", str(tmp_path / "missing.json")]) == 2
    assert main(["invariants", "--degree", "3", "--order", "4"]) == 3


def test_cli_check_computes_degree_one(capsys):
    assert main(["check", "--degree", "1"]) == 0
    assert "takahashi" in capsys.readouterr().err
