"""Acceptance suite: the package's headline guarantees at full scale.

One test per guarantee, in a fixed order, each ending with a single printed
PASS line carrying the measured numbers.  Structural claims are exact (no
tolerances); wall-clock budgets and the two float comparisons are pinned as
constants below.  The heavyweight constructions carry the ``slow`` marker so
``-m 'not slow'`` gives a quick run, but plain ``pytest`` runs everything.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from waiterclient import graphs as gr
from waiterclient import solver
from waiterclient.board import Board
from waiterclient.engine import GameState, run_game
from waiterclient.families import family_potential_phi, potential_report
from waiterclient.strategies import make_client, make_waiter

SOLVE_BUDGET_S = 300.0
LONG_CYCLE_BUDGET_S = 600.0
PIPELINE_BUDGET_S = 1800.0
FLOAT_SLACK = 1e-9

ADVERSARIES = (("lex", {}), ("random", {"seed": 11}),
               ("greedy_min_degree", {}), ("greedy_max_degree", {}))
WAITER_FOES = (("lex", {}), ("random", {"seed": 11}), ("random", {"seed": 7}),
               ("star_min_degree", {}))


def play(waiter, client, n, q, *, stop=True):
    state = GameState(Board.complete_graph(n), q, record_history=False)
    run = run_game(state, waiter, client, stop_when_waiter_done=stop)
    return state, run


def owned_cycle(state, seq, k, owned):
    if seq is None or len(seq) != k or len(set(seq)) != k:
        return False
    board = state.board
    return all(board.edge_id(seq[i], seq[(i + 1) % k]) in owned
               for i in range(k))


def test_exact_solver_connectivity_threshold():
    # the oracle confirms the connectivity threshold q <= n/2 - 1 on every
    # board it can exhaust
    t0 = time.monotonic()
    cells = ((4, 1), (4, 2), (4, 3), (5, 1), (5, 2))
    for n, q in cells:
        res = solver.solve_game_exact(n, q, "connectivity")
        want = "waiter" if q <= n // 2 - 1 else "client"
        assert res.winner == want, (n, q, res.winner)
    elapsed = time.monotonic() - t0
    assert elapsed < SOLVE_BUDGET_S
    print(f"PASS solver-threshold: {len(cells)} exact solves match "
          f"q <= n/2 - 1 in {elapsed:.1f}s")


def test_big_component_exhaustive_and_simulated():
    # every Client response sequence on the tiny boards, then the full
    # simulation grid with the exact round count 2(n-q-2) + t where
    # t = 1 - max(0, n - 2q - 2) accounts for the reduced-bias closing
    leaves = 0
    for n in range(4, 7):
        for q in range(1, n - 2):
            goal = min(n, 2 * (n - q - 1))
            res = solver.verify_waiter_strategy_exhaustive(
                lambda n=n, q=q: make_waiter("big_component", n=n, q=q), n, q,
                lambda st, g=goal: solver.objective_largest_component(st) >= g)
            assert res.ok, (n, q)
            leaves += res.leaves
    games = 0
    for n in range(4, 61):
        for q in range(max(1, (n - 1) // 2 - 1), n - 2):
            goal = min(n, 2 * (n - q - 1))
            want_rounds = 2 * (n - q - 2) + 1 - max(0, n - 2 * q - 2)
            for cname, ckw in ADVERSARIES:
                state, run = play(make_waiter("big_component", n=n, q=q),
                                  make_client(cname, **ckw), n, q)
                assert run.status in ("stopped", "complete"), (n, q, cname)
                assert run.rounds == want_rounds, (n, q, cname, run.rounds)
                sizes, _ = gr.component_profile(gr.SimpleGraph.from_game(state))
                assert sizes[0] >= goal, (n, q, cname, sizes[0])
                games += 1
    print(f"PASS big-component: {leaves} verified leaves and {games} games "
          "with exact round counts")


def test_potential_never_increases_across_thousand_games():
    # the potential argument, replayed wholesale: in every game the
    # completed-set count stays under the initial potential and the
    # potential itself never rises, in exact arithmetic
    configs = [("avoid_cycles", dict(n=5, q=1, m=3)),
               ("avoid_cycles", dict(n=5, q=2, m=3)),
               ("avoid_cycles", dict(n=6, q=2, m=3)),
               ("avoid_cycles", dict(n=6, q=3, m=3)),
               ("avoid_cycles", dict(n=7, q=3, m=3)),
               ("avoid_cycles", dict(n=7, q=4, m=3)),
               ("avoid_big_component", dict(n=6, q=4, r=1)),
               ("avoid_big_component", dict(n=7, q=5, r=1))]
    foes = [("random", {"seed": s}) for s in range(125)]
    foes += [("lex", {}), ("star_min_degree", {})]
    games = randomized = 0
    for cname, ckw in configs:
        n, q = ckw["n"], ckw["q"]
        for wname, wkw in foes:
            client = make_client(cname, **ckw)
            waiter = make_waiter(wname, n=n, q=q, **wkw)
            state = GameState(Board.complete_graph(n), q, record_history=False)
            waiter.begin(state)
            client.begin(state)
            fam = client.family
            phi0 = phi = family_potential_phi(fam, q, state, exact=True)
            while not state.terminal:
                # a waiter with nothing to say defers to the lex-least dump,
                # as the game runner does
                offer = waiter.offer(state)
                if offer is None:
                    offer = state.dump_offer()
                choice = client.choose(state, offer)
                state.apply_round_inplace(offer, choice)
                waiter.observe(state, offer, choice)
                client.observe(state, offer, choice)
                nxt = family_potential_phi(fam, q, state, exact=True)
                assert nxt <= phi, (cname, n, q, wname, state.round_index)
                phi = nxt
            assert potential_report(fam, q, state).completed <= phi0
            games += 1
            randomized += wname == "random"
    assert randomized >= 1000
    print(f"PASS potential-bound: {games} games ({randomized} randomized), "
          "potential monotone and completed <= initial in all of them")


def test_cycle_avoidance_stays_acyclic_at_guarding_bias():
    # bias ceil(1.1 n) pushes the initial potential under one, so the
    # client graph must end with no cycle at all
    games = 0
    for n in (15, 20):
        q = -(-11 * n // 10)
        for wname, wkw in WAITER_FOES:
            client = make_client("avoid_cycles", n=n, q=q, m=3)
            state, run = play(make_waiter(wname, n=n, q=q, **wkw), client,
                              n, q, stop=False)
            assert run.status == "complete"
            assert gr.is_forest(gr.SimpleGraph.from_game(state)), (n, wname)
            assert potential_report(client.family, q, state).completed == 0
            games += 1
    print(f"PASS cycle-avoidance: client acyclic in all {games} games at "
          "q = ceil(1.1 n)")


def test_long_cycle_certificate_at_scale():
    n, eta, q = 30000, 29000, 1000
    need = -(-eta // 6)
    t0 = time.monotonic()
    lengths = []
    for cname, ckw in (("lex", {}), ("random", {"seed": 5})):
        w = make_waiter("long_cycle", n=n, q=q, eta=eta)
        state, run = play(w, make_client(cname, **ckw), n, q)
        assert run.status == "stopped"
        ring = w.core.cycle
        owned = set(state.client_edges)
        assert ring is not None and len(ring) >= need
        assert owned_cycle(state, ring, len(ring), owned), cname
        assert all(ok for _, ok, _ in w.core.stage_checks())
        lengths.append(len(ring))
    elapsed = time.monotonic() - t0
    assert elapsed < LONG_CYCLE_BUDGET_S
    print(f"PASS long-cycle: cycles of {lengths} vertices >= {need}, "
          f"re-verified edgewise, in {elapsed:.1f}s")


def test_tree_counting_bounds():
    # labelled low-leaf tree counts against (ek)^(2l) k!/(2l)!, and the
    # path-tuple count of every small tree against (m/4)^(2r)
    checked = 0
    for k in range(3, 9):
        for l in range(1, (k - 1) // 2 + 1):
            count = gr.count_low_leaf_trees(k, 2 * l)[0]
            bound = ((math.e * k) ** (2 * l)
                     * math.factorial(k) / math.factorial(2 * l))
            assert count < bound, (k, l, count)
            checked += 1
    tuples = 0
    for m in range(2, 10):
        for tree in gr.free_trees(m):
            for r in (1, 2):
                cnt, (v, a, b) = gr.count_path_tuples(tree, r)
                assert cnt >= (len(a) * len(b)) ** r
                assert cnt >= (Fraction(m, 4)) ** (2 * r), (m, r, cnt)
                tuples += 1
    print(f"PASS counting: {checked} low-leaf bounds strict, {tuples} "
          "tree/tuple-length pairs over their floor")


def _graph_from_bits(n, bits):
    g = gr.SimpleGraph(n)
    i = 0
    for u in range(n):
        for v in range(u + 1, n):
            if bits >> i & 1:
                g.add_edge(u, v)
            i += 1
    return g


def _brute_longest_path(g):
    best = 0

    def extend(v, seen, length):
        nonlocal best
        best = max(best, length)
        for w in g.adj[v]:
            if w not in seen:
                seen.add(w)
                extend(w, seen, length + 1)
                seen.remove(w)

    for s in range(g.n):
        extend(s, {s}, 0)
    return best


def _brute_hamilton(g):
    if g.n < 3:
        return False
    seen = {0}

    def extend(v):
        if len(seen) == g.n:
            return g.has_edge(v, 0)
        for w in g.adj[v]:
            if w not in seen:
                seen.add(w)
                if extend(w):
                    return True
                seen.remove(w)
        return False

    return extend(0)


def _brute_boosters(g):
    # definition-level: a non-edge boosts if adding it makes the graph
    # Hamiltonian or stretches its longest path
    if _brute_hamilton(g):
        return set()
    base = _brute_longest_path(g)
    out = set()
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if g.has_edge(u, v):
                continue
            g2 = g.copy()
            g2.add_edge(u, v)
            if _brute_hamilton(g2) or _brute_longest_path(g2) > base:
                out.add((u, v))
    return out


def _petersen():
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return gr.SimpleGraph.from_edges(10, edges)


def _two_k6():
    blocks = (list(range(6)), [0] + list(range(6, 11)))
    edges = {(min(u, v), max(u, v)) for blk in blocks
             for i, u in enumerate(blk) for v in blk[i + 1:]}
    return gr.SimpleGraph.from_edges(11, sorted(edges))


def test_booster_counts_brute_force_and_expander_bound():
    # boosters_exact against the brute-force definition on a wide corpus,
    # then the quadratic booster supply of verified expanders
    corpus = [_graph_from_bits(4, b) for b in range(1 << 6)]
    corpus += [_graph_from_bits(5, b) for b in range(1 << 10)]
    rng = np.random.default_rng(0)
    for _ in range(150):
        bits = int(rng.integers(0, 1 << 15))
        corpus.append(_graph_from_bits(6, bits))
    for g in corpus:
        assert gr.boosters_exact(g) == _brute_boosters(g)

    k23 = gr.SimpleGraph.from_edges(
        5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])
    bowtie = gr.SimpleGraph.from_edges(
        5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])
    instances = [(_petersen(), Fraction(1, 5)), (k23, Fraction(1, 5)),
                 (bowtie, Fraction(1, 5)), (_two_k6(), Fraction(2, 11))]
    supplies = []
    for g, alpha in instances:
        verdict = gr.check_expander(g, 2, float(alpha), mode="exhaustive")
        assert verdict.holds and verdict.mode == "exact", verdict
        _, connected = gr.component_profile(g)
        assert connected and not gr.has_hamilton_cycle(g)
        count = len(gr.boosters_exact(g))
        assert count >= alpha * alpha * g.n * g.n / 2, (g.n, count)
        supplies.append(count)
    print(f"PASS boosters: exact set matches brute force on {len(corpus)} "
          f"graphs; expander supplies {supplies} over their quadratic floor")


@pytest.mark.slow
def test_expander_pipelines_certify_spectrum_hamilton_pancyclic():
    times = {}

    n, d, q = 6000, 4, 1
    t0 = time.monotonic()
    w = make_waiter("expander_cycles", n=n, d=d, q=q)
    state, run = play(w, make_client("lex"), n, q)
    checks = w.core.stage_checks()
    assert run.status == "stopped" and all(ok for _, ok, _ in checks)
    assert any(name.endswith(":expander") for name, ok, _ in checks)
    owned = set(state.client_edges)
    cycles = w.core.cycles
    for k in range(3, n // 6 + 1):
        assert owned_cycle(state, cycles.get(k), k, owned), k
    _, connected = gr.component_profile(gr.SimpleGraph.from_game(state))
    assert connected
    times["spectrum"] = time.monotonic() - t0
    assert times["spectrum"] < PIPELINE_BUDGET_S

    n, q = 6000, 1
    t0 = time.monotonic()
    w = make_waiter("hamiltonian_expander", n=n, q=q)
    state, run = play(w, make_client("lex"), n, q)
    assert run.status == "stopped"
    assert all(ok for _, ok, _ in w.core.stage_checks())
    owned = set(state.client_edges)
    assert owned_cycle(state, w.core.hamilton, n, owned)
    times["hamilton"] = time.monotonic() - t0
    assert times["hamilton"] < PIPELINE_BUDGET_S

    n, q = 7000, 1
    t0 = time.monotonic()
    w = make_waiter("pancyclic", n=n, q=q)
    state, run = play(w, make_client("lex"), n, q)
    assert run.status == "stopped"
    assert all(ok for _, ok, _ in w.core.stage_checks())
    owned = set(state.client_edges)
    for k in range(3, n + 1):
        assert owned_cycle(state, w.core.cycle_for(k), k, owned), k
    times["pancyclic"] = time.monotonic() - t0
    assert times["pancyclic"] < PIPELINE_BUDGET_S

    spent = ", ".join(f"{k} {v:.0f}s" for k, v in times.items())
    print(f"PASS pipelines: spectrum 3..1000, Hamilton 6000, pancyclic "
          f"3..7000 all re-verified edgewise ({spent})")


def test_min_degree_starvation_at_half_bias():
    # at q = 0.49 n the client pins a vertex to degree <= 1 whatever the
    # waiter does; when its guard stage engages, the boundary averaging
    # inequality (mean waiter degree >= its floor) must hold
    n, q = 200, 98
    engaged = 0
    for wname, wkw in WAITER_FOES:
        client = make_client("min_degree", n=n, q=q)
        state, run = play(make_waiter(wname, n=n, q=q, **wkw), client,
                          n, q, stop=False)
        assert run.status == "complete"
        deg = state.client_degree[:n]
        assert int(deg.min()) <= 1, wname
        if client.x is not None:
            assert int(deg[client.x]) <= 1, wname
            e = client.entry
            assert e["waiter_degree_mean"] >= (e["waiter_degree_floor"]
                                               - FLOAT_SLACK), wname
            engaged += 1
        else:
            assert client.entry is None
    print(f"PASS min-degree: starved vertex against {len(WAITER_FOES)} "
          f"waiters, averaging inequality held in {engaged} engaged games")


@pytest.mark.slow
def test_path_doubling_invariants_at_scale():
    # each doubling phase must report its count/size bound and endpoint
    # freeness, the final family must sit in the client graph, and the
    # client graph itself must re-verify as that many disjoint paths
    results = []
    for n, q in ((10_000, 10_000), (100_000, 100_000)):
        for seed in (3, 17):
            w = make_waiter("path_doubling", n=n, q=q)
            state, run = play(w, make_client("random", seed=seed), n, q)
            core = w.core
            assert run.status == "stopped"
            checks = {name: ok for name, ok, _ in core.stage_checks()}
            for t in range(1, core.t_star + 1):
                assert checks[f"path_doubling:phase-{t}-count"], (n, seed, t)
                assert checks[f"path_doubling:phase-{t}-endpoints-free"]
            assert checks["path_doubling:paths-in-client-graph"]
            assert all(checks.values())
            g = gr.SimpleGraph.from_game(state)
            assert gr.is_forest(g)
            assert max(len(g.adj[v]) for v in range(n)) <= 2
            sizes, _ = gr.component_profile(g)
            want = 2 ** core.t_star
            busy = [s for s in sizes if s > 1]
            assert all(s == want for s in busy)
            assert len(busy) >= core.bounds[core.t_star]
            results.append((n, len(busy), want))
    print(f"PASS path-doubling: {results} as (board, paths, length) all "
          "phases checked")
