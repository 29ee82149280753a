import os
import pathlib

import pytest

import dpp

MODELS = pathlib.Path(os.environ.get("DPP_MODELS_DIR", pathlib.Path(__file__).resolve().parents[2] / "models"))


def model(name):
    return dpp.load(str(MODELS / name))


def test_example1_reachable():
    report = dpp.check(model("example1.dpp"), "general", emit_witness=True)
    assert report["verdict"] == "Reachable"
    assert "w(g0,#)" in report["witness"]
    assert report["trace"]


def test_empty_unreachable():
    report = dpp.check(model("empty.dpp"))
    assert report["verdict"] == "Unreachable"
    assert report["witness"] is None


def test_multiplicity():
    spec = model("example1.dpp")
    assert not dpp.oracle(spec, children=1)["found"]
    found = dpp.oracle(spec, children=2)
    assert found["found"]
    assert found["run"][-1][0] == "w(g0,#)"
    assert dpp.oracle(spec, "set")["found"]


def test_levels_and_signatures():
    spec = model("example2.dpp")
    sigs = dpp.levels(spec, 1, "signatures")
    assert "spawn(p) i(x,1) o(x,2)" in sigs[1]
    cores = dpp.levels(model("example1.dpp"), 1)
    assert "spawn(q) w(g0,#)" in cores[1]


def test_parse_round_trip_and_errors():
    spec = model("example3.dpp")
    assert spec.kind == "pushdown"
    again = dpp.parse(spec.to_text())
    assert again.to_text() == spec.to_text()
    with pytest.raises(dpp.ParseError):
        dpp.parse("kind finite\noops\n")
    with pytest.raises(ValueError):
        dpp.check(spec, "fastest")


def test_fragments_and_flatten():
    sat = dpp.encode_sat("p cnf 2 2\n1 2 0\n-1 0\n")
    assert sat.fragment()["simple_futures"]
    assert dpp.check(sat, "simple-futures")["verdict"] == "Reachable"
    unsat = dpp.encode_sat("p cnf 1 2\n1 0\n-1 0\n")
    assert dpp.check(unsat)["verdict"] == "Unreachable"
    with pytest.raises(dpp.FragmentMismatch):
        dpp.flatten(model("example1.dpp"))
    flat = dpp.flatten(dpp.parse("kind finite\nvalues 0 #\ninit_value 0\ntarget #\nglobals g\ninit q\nrules\nq --spawn(p)--> q1\n"))
    assert "init_sp" in flat.controls
