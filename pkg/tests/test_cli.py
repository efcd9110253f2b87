"""Command line interface: subcommands, formats, exit codes."""

import json

from waiterclient import graphs as gr
from waiterclient import transcripts
from waiterclient.cli import _int_list, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_int_list_parses_commas_and_ranges():
    assert _int_list("3,5,9") == [3, 5, 9]
    assert _int_list("2:8:3") == [2, 5, 8]
    assert _int_list("4:6") == [4, 5, 6]
    assert _int_list("1,10:12") == [1, 10, 11, 12]


def test_play_text_reports_checks_and_exits_zero(capsys):
    code, out, _ = run(capsys, "play", "--n", "12", "--q", "2",
                       "--waiter", "connectivity",
                       "--client", "greedy_min_degree")
    assert code == 0
    assert "status: complete" in out
    assert "check connectivity:component-growth: ok" in out


def test_play_structured_writes_a_replayable_transcript(capsys, tmp_path):
    out_file = tmp_path / "game.json"
    code, _, _ = run(capsys, "play", "--n", "10", "--q", "3",
                     "--waiter", "big_component", "--client", "random",
                     "--seed", "7", "--format", "structured",
                     "--out", str(out_file))
    assert code == 0
    state = transcripts.replay(out_file.read_text())
    assert state.terminal


def test_solve_text_and_structured(capsys):
    code, out, _ = run(capsys, "solve", "--n", "4", "--q", "1",
                       "--objective", "connectivity")
    assert code == 0
    assert "value: 1" in out and "winner: waiter" in out
    code, out, _ = run(capsys, "solve", "--n", "4", "--q", "2",
                       "--format", "structured")
    doc = json.loads(out)
    assert code == 0
    assert doc["value"] == 2
    assert transcripts.replay(
        transcripts.canonical_json(doc["variation"])).terminal


def test_solve_over_budget_exits_two(capsys):
    code, _, err = run(capsys, "solve", "--n", "8", "--q", "2")
    assert code == 2
    assert "error:" in err


def test_verify_passes_and_refutes(capsys):
    code, out, _ = run(capsys, "verify", "--waiter", "connectivity",
                       "--n", "4", "--q", "1")
    assert code == 0 and "verified over 8" in out
    code, out, _ = run(capsys, "verify", "--waiter", "random",
                       "--n", "4", "--q", "1", "--seed", "5")
    assert code == 4
    text = out.split("counterexample transcript:\n", 1)[1]
    state = transcripts.replay(text.strip())
    _, connected = gr.component_profile(gr.SimpleGraph.from_game(state))
    assert not connected
    # numeric target mode
    code, out, _ = run(capsys, "verify", "--waiter", "big_component",
                       "--n", "6", "--q", "2", "--objective", "component",
                       "--target", "6")
    assert code == 0 and "243" in out


def test_families_inspection_matches_strategy_truncation(capsys):
    code, out, _ = run(capsys, "families", "--family", "cycles",
                       "--n", "15", "--q", "17")
    assert code == 0
    assert "cycles(n=15,m=3,max=5)" in out
    assert "sets: 40586" in out
    code, out, _ = run(capsys, "families", "--family", "path_tuples",
                       "--n", "14", "--q", "10")
    assert code == 2


def test_sweep_structured_output(capsys):
    code, out, _ = run(capsys, "sweep", "--n", "8", "--q", "2:4:2",
                       "--waiter", "big_component", "--client", "random",
                       "--trials", "2", "--format", "structured")
    assert code == 0
    doc = json.loads(out)
    assert {row["q"] for row in doc["rows"]} == {2, 4}
    assert len(doc["rows"]) == 4
