"""Avoidance strategies: cycle dodging, component capping, degree starving."""

import warnings
from fractions import Fraction

import numpy as np
import pytest

from waiterclient import graphs as gr
from waiterclient.board import Board
from waiterclient.engine import GameState, ParameterError, run_game
from waiterclient.families import (DEFAULT_SET_BUDGET, MinimizePotentialClient,
                                   build_cycle_family, cycle_family_size,
                                   family_potential_phi, potential_report)
from waiterclient.strategies import make_client, make_waiter

FOES = (("lex", None), ("random", 11), ("random", 7), ("star_min_degree", None))


def play(wname, cname, n, q, *, wseed=None, **ckw):
    state = GameState(Board.complete_graph(n), q, record_history=False)
    wkw = {"seed": wseed} if wseed is not None else {}
    waiter = make_waiter(wname, n=n, q=q, **wkw)
    client = make_client(cname, n=n, q=q, **ckw)
    run = run_game(state, waiter, client)
    return state, run, client


def _components(g):
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp, stack = [s], [s]
        while stack:
            u = stack.pop()
            for v in g.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        comps.append(comp)
    return comps


def _bfs_tree(g, comp):
    # spanning tree of one component, relabelled to 0..len(comp)-1
    loc = {v: i for i, v in enumerate(comp)}
    tree = gr.SimpleGraph(len(comp))
    seen = {comp[0]}
    stack = [comp[0]]
    while stack:
        u = stack.pop()
        for v in g.adj[u]:
            if v not in seen:
                seen.add(v)
                tree.add_edge(loc[u], loc[v])
                stack.append(v)
    return tree


# -- cycle avoidance ---------------------------------------------------------

def test_avoid_cycles_keeps_forest_above_protecting_bias():
    # q = ceil(1.1 n) puts the initial potential under 1, so the client's
    # final graph cannot contain any cycle at all
    for n in (15, 20):
        q = -(-11 * n // 10)
        for wname, wseed in FOES:
            state, _run, client = play(wname, "avoid_cycles", n, q,
                                       wseed=wseed, m=3)
            g = gr.SimpleGraph.from_game(state)
            assert gr.is_forest(g), (n, q, wname)
            rep = potential_report(client.family, q, state)
            assert rep.completed == 0, (n, q, wname)


def test_avoid_cycles_family_matches_closed_form_count():
    client = make_client("avoid_cycles", n=15, q=17, m=3)
    assert client.family.label == "cycles(n=15,m=3,max=5)"
    assert len(client.family) == cycle_family_size(15, 3, 5)
    # the cap at 5 is the client's final edge count, not the budget
    assert cycle_family_size(15, 3, 5) < DEFAULT_SET_BUDGET
    assert 15 * 14 // 2 // 18 == 5


def test_avoid_cycles_budget_shrinks_the_length_cap():
    # at n=20, q=22 the client ends with 8 edges but the family stops at
    # 6-cycles because 7-cycles would blow the set budget
    client = make_client("avoid_cycles", n=20, q=22, m=3)
    assert client.family.label == "cycles(n=20,m=3,max=6)"
    assert len(client.family) == cycle_family_size(20, 3, 6)
    assert cycle_family_size(20, 3, 7) > DEFAULT_SET_BUDGET


def test_avoid_cycles_long_target_gives_empty_family():
    # no cycle can be longer than the board, so the goal is free
    state, run, client = play("random", "avoid_cycles", 20, 24,
                              wseed=3, m=23)
    assert len(client.family) == 0
    assert client.family.label == "cycles(n=20,m=23,empty)"
    assert run.status == "complete"
    # the client ends with fewer than 23 edges, so the goal is met whatever
    # shape its graph takes
    assert len(state.client_edges) < 23


def test_avoid_cycles_initial_potential_closed_form():
    fam = build_cycle_family(5, 3)
    assert len(fam) == 37
    assert np.bincount(fam.sizes)[[3, 4, 5]].tolist() == [10, 15, 12]
    assert family_potential_phi(fam, 2) == Fraction(49, 81)


def test_avoid_cycles_rejects_tiny_target():
    with pytest.raises(ParameterError):
        make_client("avoid_cycles", n=10, q=11, m=2)


# -- potential lemma ---------------------------------------------------------

def test_min_potential_never_raises_the_potential():
    # the defining property of the potential player, round by round, in
    # exact arithmetic, against arbitrary offers
    fam = build_cycle_family(6, 3)
    for seed in range(8):
        state = GameState(Board.complete_graph(6), 2, record_history=False)
        waiter = make_waiter("random", seed=seed)
        client = MinimizePotentialClient(fam, exact=True)
        waiter.begin(state)
        client.begin(state)
        phi = family_potential_phi(fam, 2, state, exact=True)
        while not state.terminal:
            offer = waiter.offer(state)
            choice = client.choose(state, offer)
            state.apply_round_inplace(offer, choice)
            waiter.observe(state, offer, choice)
            client.observe(state, offer, choice)
            nxt = family_potential_phi(fam, 2, state, exact=True)
            assert nxt <= phi, (seed, state.round_index)
            phi = nxt
        assert potential_report(fam, 2, state).completed <= phi


# -- component capping -------------------------------------------------------

def test_avoid_big_component_bounds_components_by_potential():
    for wname, wseed in FOES:
        state, _run, client = play(wname, "avoid_big_component", 8, 10,
                                   wseed=wseed, r=1)
        phi0 = float(family_potential_phi(client.family, 10))
        rep = potential_report(client.family, 10, state)
        assert rep.completed <= float(rep.phi) + 1e-9 <= phi0 + 1e-9
        sizes, _conn = gr.component_profile(gr.SimpleGraph.from_game(state))
        assert sizes[0] <= 4 * phi0 ** 0.5 + 1e-9, (wname, sizes)


def test_avoid_big_component_tuple_count_certificate():
    # the completed-set count dominates the path-tuple count of each
    # component; components of three or more vertices also carry the
    # centroid certificate (a single edge has no two-sided split)
    state, _run, client = play("star_min_degree", "avoid_big_component",
                               8, 4, r=1)
    rep = potential_report(client.family, 4, state)
    g = gr.SimpleGraph.from_game(state)
    total = 0
    certified = 0
    for comp in _components(g):
        if len(comp) < 2:
            continue
        tree = _bfs_tree(g, comp)
        if len(comp) == 2:
            total += 1
            continue
        cnt, (v, a, b) = gr.count_path_tuples(tree, 1)
        assert cnt >= len(a) * len(b) >= (len(comp) / 4) ** 2, comp
        total += cnt
        certified += 1
    assert certified > 0
    assert rep.completed >= total > 0


def test_avoid_big_component_rejects_bad_tuple_length():
    with pytest.raises(ParameterError):
        make_client("avoid_big_component", n=8, q=10, r=0)


# -- degree starving ---------------------------------------------------------

def test_min_degree_starves_a_vertex_at_half_bias():
    for wname, wseed in FOES:
        state, run, client = play(wname, "min_degree", 200, 98, wseed=wseed)
        assert run.status == "complete"
        deg = state.client_degree[:200]
        assert int(deg.min()) <= 1, wname
        if client.x is None:
            # the touched-vertex count never reached n/4, so isolated
            # vertices survive to the end and the goal is free
            assert client.entry is None
            assert int((deg == 0).sum()) >= 200 - 52, wname
        else:
            assert int(deg[client.x]) <= 1, wname
            e = client.entry
            assert e["protected"] == client.x
            assert e["touched"] in (50, 51)
            assert e["waiter_degree_mean"] >= e["waiter_degree_floor"] - 1e-9
            assert e["round"] < run.rounds


def test_min_degree_stage_two_snapshot_is_deterministic():
    # the star waiter drives the touched count up fast, so stage two starts
    # early and the guarded vertex still ends with a single client edge
    state, run, client = play("star_min_degree", "min_degree", 200, 98)
    assert client.entry == pytest.approx({
        "round": 49, "touched": 50, "protected": 50,
        "waiter_degree_mean": 24.173333333333332,
        "waiter_degree_floor": 8.333333333333334,
    })
    assert int(state.client_degree[client.x]) == 1


def test_min_degree_warns_below_half_bias():
    with pytest.warns(UserWarning, match="0.49"):
        make_client("min_degree", n=200, q=50)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        make_client("min_degree", n=200, q=98)
