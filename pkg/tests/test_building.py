"""Construction strategies: component growth, connectivity, paths, cycles."""

import numpy as np
import pytest

from waiterclient import graphs as gr
from waiterclient.board import Board
from waiterclient.engine import ForfeitError, GameState, ParameterError, run_game
from waiterclient.strategies import make_client, make_waiter
from waiterclient.strategies.building import BigComponentCore, PathDoublingCore

ADVERSARIES = ("lex", "random", "greedy_min_degree", "greedy_max_degree")


def play(wname, cname, n, q, *, seed=None, stop=False, **wkw):
    state = GameState(Board.complete_graph(n), q)
    waiter = make_waiter(wname, n=n, q=q, **wkw)
    ckw = {"seed": seed} if seed is not None else {}
    client = make_client(cname, n=n, q=q, **ckw)
    run = run_game(state, waiter, client, stop_when_waiter_done=stop)
    return state, run, waiter


def checks_of(waiter):
    return waiter.core.stage_checks()


def biggest_component(state):
    sizes, _ = gr.component_profile(gr.SimpleGraph.from_game(state))
    return sizes[0]


def component_goal(n, q):
    design = max(q, (n - 2) // 2)
    return min(n, 2 * (n - design - 1))


# -- big component ----------------------------------------------------------

def test_big_component_reaches_goal_vs_adversaries():
    for n in range(4, 13):
        for q in range(1, n - 2):
            for cname in ADVERSARIES:
                seed = 5 if cname == "random" else None
                state, run, waiter = play("big_component", cname, n, q, seed=seed)
                assert run.status == "complete", (n, q, cname, run.forfeit)
                assert biggest_component(state) >= component_goal(n, q), (n, q, cname)
                assert all(ok for _s, ok, _d in checks_of(waiter)), (n, q, cname)


def test_big_component_round_count_and_exact_size():
    # at the design bias the construction runs its exact round budget and
    # hits the goal size on the nose
    for n, q, rounds in ((10, 4, 9), (9, 3, 8), (12, 5, 11), (12, 7, 7)):
        state, run, waiter = play("big_component", "random", n, q,
                                  seed=1, stop=True)
        assert run.status in ("stopped", "complete")
        assert state.round_index == rounds
        assert biggest_component(state) == component_goal(n, q)
        assert all(ok for _s, ok, _d in checks_of(waiter))


def test_big_component_stage_check_names():
    _state, _run, waiter = play("big_component", "lex", 11, 4)
    stages = [s for s, _ok, _d in checks_of(waiter)]
    assert stages == ["big_component:tree-ladder",
                      "big_component:component-growth"]


def exhaust_all_plays(n, q):
    """Drive the construction against every Client decision sequence."""
    board = Board.complete_graph(n)
    goal = component_goal(n, q)
    pending = [()]
    leaves = 0
    while pending:
        prefix = pending.pop()
        state = GameState(board, q)
        waiter = make_waiter("big_component", n=n, q=q)
        waiter.begin(state)
        for pick in prefix:
            offer = waiter.offer(state)
            choice = int(offer[pick])
            state.apply_round_inplace(offer, choice)
            waiter.observe(state, offer, choice)
        offer = None if state.terminal else waiter.offer(state)
        if offer is None:
            leaves += 1
            sizes, _ = gr.component_profile(gr.SimpleGraph.from_game(state))
            assert sizes[0] >= goal, (n, q, prefix, sizes)
            assert all(ok for _s, ok, _d in waiter.core.stage_checks()), \
                (n, q, prefix)
        else:
            assert len(offer) == q + 1
            pending.extend(prefix + (pick,) for pick in range(len(offer)))
    return leaves


def test_big_component_exhaustive_small_boards():
    # every Client play, not just the adversary suite; covers both parities
    assert exhaust_all_plays(4, 1) == 8
    assert exhaust_all_plays(5, 1) == 16
    assert exhaust_all_plays(5, 2) == 27
    assert exhaust_all_plays(6, 2) == 243
    assert exhaust_all_plays(7, 2) == 729


def test_big_component_oversized_bias_falls_back_to_dump():
    state, run, _waiter = play("big_component", "lex", 5, 4)
    assert run.status == "complete"
    assert len(state.client_edges) == state.board.size // 5


def test_big_component_core_validates_design_range():
    with pytest.raises(ParameterError):
        BigComponentCore(list(range(10)), 3)   # below (n-2)//2
    with pytest.raises(ParameterError):
        BigComponentCore(list(range(10)), 8)   # above n-3
    with pytest.raises(ParameterError):
        BigComponentCore([0, 1, 2, 2], 1)


# -- connectivity -----------------------------------------------------------

def test_connectivity_spans_for_all_valid_biases():
    for n in range(4, 15):
        for q in range(1, n // 2):
            for cname in ("lex", "random"):
                seed = 9 if cname == "random" else None
                state, run, waiter = play("connectivity", cname, n, q, seed=seed)
                assert run.status == "complete", (n, q, cname, run.forfeit)
                _sizes, connected = gr.component_profile(
                    gr.SimpleGraph.from_game(state))
                assert connected, (n, q, cname)
                assert all(ok for _s, ok, _d in checks_of(waiter))


def test_connectivity_small_bias_reduction():
    # a recipe designed for bias 3 still spans when the real bias is 1
    state, run, _waiter = play("connectivity", "greedy_max_degree", 8, 1)
    assert run.status == "complete"
    assert gr.component_profile(gr.SimpleGraph.from_game(state))[1]


def test_connectivity_rejects_bias_past_threshold():
    for n in (4, 7, 10, 11):
        make_waiter("connectivity", n=n, q=n // 2 - 1)
        with pytest.raises(ParameterError):
            make_waiter("connectivity", n=n, q=n // 2)


# -- path doubling ----------------------------------------------------------

def test_path_doubling_phase_counts():
    core = PathDoublingCore(1000, 1000)
    assert core.t_star == 1 and core.targets == [100]
    core = PathDoublingCore(10**4, 10**4)
    assert core.t_star == 1 and core.targets == [1000]
    assert PathDoublingCore(500, 500).t_star == 0
    with pytest.raises(ParameterError):
        PathDoublingCore(1000, 999)


def test_path_doubling_builds_disjoint_client_paths():
    for cname, seed in (("lex", None), ("random", 3)):
        state, run, waiter = play("path_doubling", cname, 1000, 1000,
                                  seed=seed, stop=True)
        assert run.status == "stopped"
        paths = waiter.core.paths
        assert len(paths) == 100 and all(len(p) == 2 for p in paths)
        owned = set(state.client_edges)
        used = [v for p in paths for v in p]
        assert len(used) == len(set(used))
        for p in paths:
            for a, b in zip(p, p[1:]):
                assert state.board.edge_id(*sorted((a, b))) in owned
        stages = dict((s, ok) for s, ok, _d in checks_of(waiter))
        assert stages["path_doubling:phase-1-count"]
        assert stages["path_doubling:phase-1-endpoints-free"]
        assert stages["path_doubling:paths-in-client-graph"]


def test_path_doubling_under_bias_reduction():
    # design bias is max(q, n); play well below it
    state, run, waiter = play("path_doubling", "random", 1000, 600,
                              seed=11, stop=True)
    assert run.status == "stopped"
    assert len(waiter.core.paths) == 100
    assert all(ok for _s, ok, _d in checks_of(waiter))


def test_path_doubling_degenerate_stage_zero():
    state, run, waiter = play("path_doubling", "lex", 500, 500, stop=True)
    assert run.status == "stopped"
    assert state.round_index == 0
    assert [len(p) for p in waiter.core.paths] == [1] * 500


# -- long cycle -------------------------------------------------------------

def test_long_cycle_certificate_on_small_instance():
    n, q, eta = 400, 30, 370
    floor = -(-eta // 6)
    for cname, seed in (("lex", None), ("random", 3), ("random", 11),
                        ("greedy_min_degree", None)):
        state, run, waiter = play("long_cycle", cname, n, q,
                                  seed=seed, stop=True, eta=eta)
        assert run.status == "stopped", (cname, seed, run.forfeit)
        cycle = waiter.core.cycle
        assert len(cycle) >= floor
        assert gr.verify_cycle(gr.SimpleGraph.from_game(state), cycle)
        assert all(ok for _s, ok, _d in checks_of(waiter))


def test_long_cycle_default_eta_is_gap_to_bias():
    state, run, waiter = play("long_cycle", "random", 400, 30,
                              seed=5, stop=True)
    assert run.status == "stopped"
    assert len(waiter.core.cycle) >= -(-370 // 6)


def test_long_cycle_rejects_infeasible_shapes():
    with pytest.raises(ParameterError):
        make_waiter("long_cycle", n=50, q=40, eta=30)
    with pytest.raises(ParameterError):
        make_waiter("long_cycle", n=400, q=30, eta=8)
    with pytest.raises(ParameterError):
        make_waiter("long_cycle", n=400, q=30, eta=400)


# -- k-connectivity ---------------------------------------------------------

def test_k_connected_client_graph_survives_removals():
    for n, q, k in ((45, 2, 3), (40, 1, 4)):
        for cname, seed in (("lex", None), ("random", 3)):
            state, run, waiter = play("k_connected", cname, n, q,
                                      seed=seed, stop=True, k=k)
            assert run.status == "stopped", (n, q, k, cname, run.forfeit)
            verdict = gr.vertex_connectivity_at_least(
                gr.SimpleGraph.from_game(state), k, mode="exact")
            assert verdict.holds, (n, q, k, cname, verdict)
            assert all(ok for _s, ok, _d in checks_of(waiter))


def test_k_connected_needs_room_for_the_edge_classes():
    state = GameState(Board.complete_graph(12), 3)
    waiter = make_waiter("k_connected", n=12, q=3, k=3)
    client = make_client("lex", n=12, q=3)
    with pytest.raises(ForfeitError) as err:
        run_game(state, waiter, client)
    assert err.value.stage == "setup"
