"""Batch sweep harness: grids, metrics, determinism, rendering."""

import json

import pytest

from waiterclient.engine import ParameterError
from waiterclient.sweep import ExperimentSpec, run_sweep


def test_component_medians_straddle_the_bias_transition():
    # below q = n the construction pins the largest component at
    # 2(n - q - 1); far above it the offers degrade to lexicographic dumps
    # and a random client only ever collects scattered fragments
    spec = ExperimentSpec(ns=(200,), qs=(150, 250), waiter="big_component",
                          client="random", trials=20, seed=3,
                          metrics=("component", "rounds"))
    res = run_sweep(spec)
    assert len(res.rows) == 40
    low, high = res.summary
    assert low["q"] == 150 and low["component"]["min"] >= 98
    assert high["q"] == 250 and high["component"]["max"] <= 40
    assert not res.any_forfeit


def test_same_seed_gives_identical_bytes():
    spec = ExperimentSpec(ns=(30,), qs=(5, 9), waiter="big_component",
                          client="random", trials=5, seed=12)
    a = run_sweep(spec).to_structured()
    b = run_sweep(spec).to_structured()
    assert a == b
    doc = json.loads(a)
    assert {row["q"] for row in doc["rows"]} == {5, 9}
    assert doc["spec"]["waiter"] == "big_component"


def test_empty_bias_range_gives_empty_table():
    res = run_sweep(ExperimentSpec(ns=(20,), qs=(), waiter="lex",
                                   client="lex"))
    assert res.rows == [] and res.summary == []
    assert res.to_text().startswith("n\tq\ttrial")


def test_spec_validation_rejects_unresolved_names():
    with pytest.raises(ParameterError):
        run_sweep(ExperimentSpec(ns=(10,), qs=(2,), waiter="nope"))
    with pytest.raises(ParameterError):
        run_sweep(ExperimentSpec(ns=(10,), qs=(2,), client="nope"))
    with pytest.raises(ParameterError):
        run_sweep(ExperimentSpec(ns=(10,), qs=(2,), metrics=("nope",)))
    with pytest.raises(ParameterError):
        run_sweep(ExperimentSpec(ns=(10,), qs=(2,), fmt="yaml"))
    with pytest.raises(ParameterError):
        run_sweep(ExperimentSpec(ns=(10,), qs=(2,), trials=0))


def test_client_edge_metric_matches_the_edge_law():
    res = run_sweep(ExperimentSpec(ns=(8, 9), qs=(3,), waiter="lex",
                                   client="random", trials=2,
                                   metrics=("client_edges", "rounds")))
    for row in res.rows:
        e = row["n"] * (row["n"] - 1) // 2
        assert row["client_edges"] == e // (row["q"] + 1)
        assert row["rounds"] == row["client_edges"]


def test_sweep_writes_rendered_output(tmp_path):
    out = tmp_path / "sweep.txt"
    spec = ExperimentSpec(ns=(8,), qs=(3,), waiter="lex", client="random",
                          trials=2, fmt="text", out=str(out))
    res = run_sweep(spec)
    assert out.read_text() == res.to_text()
    assert "summary" in res.to_text()
