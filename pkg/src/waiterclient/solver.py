"""Exact minimax solving and exhaustive strategy verification at toy scale.

The solver walks the full game tree: Waiter move = any (q+1)-subset of the
free elements, Client move = any element of the offer.  Values are memoized
on the ownership map, which determines everything downstream.  Offers are
enumerated in ascending lexicographic order and no symmetry reduction is
applied, so results are reproducible and auditable move by move.

Waiter maximizes the objective over the final Client graph, Client
minimizes it; a predicate objective is just a 0/1 statistic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import graphs as gr
from . import transcripts
from .board import Board
from .engine import BudgetExceededError, GameState, run_game

MAX_SOLVE_ELEMENTS = 12
MAX_VERIFY_LEAVES = 500_000


def objective_largest_component(state: GameState) -> int:
    sizes, _ = gr.component_profile(gr.SimpleGraph.from_game(state))
    return sizes[0]


def objective_connected(state: GameState) -> bool:
    _, connected = gr.component_profile(gr.SimpleGraph.from_game(state))
    return connected


def objective_client_edges(state: GameState) -> int:
    return len(state.client_edges)


OBJECTIVES = {
    "connectivity": objective_connected,
    "component": objective_largest_component,
    "client_edges": objective_client_edges,
}


@dataclass
class SolveResult:
    """Outcome of an exact solve.

    ``value`` is the minimax value of the objective; for predicate
    objectives ``winner`` says which side gets its way ("waiter" when the
    predicate holds under optimal play).  ``variation`` is a replayable
    transcript of one optimal line; re-playing it attains ``value``.  The
    memo-free cross-check mode returns no variation.
    """

    value: int
    winner: str | None
    variation: transcripts.Transcript | None
    states: int
    leaves: int


def _offer_choices(state: GameState):
    free = [int(e) for e in state.own.free_ids_in(0, state.board.size)]
    return itertools.combinations(free, state.offer_size())


def solve_game_exact(board: Board | int, q: int, objective="component", *,
                     max_elements: int = MAX_SOLVE_ELEMENTS,
                     memo: bool = True) -> SolveResult:
    """Exact game value by exhaustive minimax.

    ``objective`` is a named statistic from ``OBJECTIVES`` or any callable
    on the final state; predicates count as 1 when they hold.  Boards over
    ``max_elements`` elements are refused: the tree is exponential and the
    point of this solver is ground truth for the small cases, not scale.
    """
    if isinstance(board, int):
        board = Board.complete_graph(board)
    if board.size > max_elements:
        raise BudgetExceededError(
            f"exact solve limited to {max_elements} elements, "
            f"board has {board.size}")
    fn = OBJECTIVES[objective] if isinstance(objective, str) else objective
    predicate = None  # decided on the first leaf
    table: dict[bytes, int] = {}
    best: dict[bytes, tuple] = {}
    stats = {"states": 0, "leaves": 0}

    def value_of(state: GameState) -> int:
        nonlocal predicate
        if state.terminal:
            stats["leaves"] += 1
            raw = fn(state)
            if predicate is None:
                predicate = isinstance(raw, (bool, np.bool_))
            return int(raw)
        key = state.own.key() if memo else None
        if key is not None and key in table:
            return table[key]
        stats["states"] += 1
        best_v, best_move = None, None
        for offer in _offer_choices(state):
            worst, pick = None, None
            for choice in offer:
                v = value_of(state.clone().apply_round_inplace(offer, choice))
                if worst is None or v < worst:
                    worst, pick = v, choice
            if best_v is None or worst > best_v:
                best_v, best_move = worst, (offer, pick)
        if key is not None:
            table[key] = best_v
            best[key] = best_move
        return best_v

    root = GameState(board, q, record_history=False)
    if not memo:
        # cross-check mode: recompute the bare value, no variation to walk
        v = value_of(root)
        return SolveResult(v, _winner(predicate, v), None,
                           stats["states"], stats["leaves"])
    v = value_of(root)

    # walk the memoized optimal line and record it as a transcript
    replay = GameState(board, q, record_history=True)
    while not replay.terminal:
        offer, choice = best[replay.own.key()]
        replay.apply_round_inplace(offer, choice)
    pv = transcripts.Transcript(
        board=board, q=q,
        waiter={"name": "oracle", "params": {}},
        client={"name": "oracle", "params": {}},
        rounds=list(replay.history), status="complete")
    if int(fn(replay)) != v:
        raise AssertionError(
            f"principal variation reaches {fn(replay)}, solver says {v}")
    return SolveResult(v, _winner(predicate, v), pv,
                       stats["states"], stats["leaves"])


def _winner(predicate: bool | None, value: int) -> str | None:
    if not predicate:
        return None
    return "waiter" if value else "client"


def game_value_comp(n: int, q: int, **kw) -> int:
    """Largest-component order under optimal play on K_n at bias q."""
    return solve_game_exact(Board.complete_graph(n), q,
                            objective_largest_component, **kw).value


@dataclass
class VerifyResult:
    ok: bool
    leaves: int
    counterexample: transcripts.Transcript | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_waiter_strategy_exhaustive(waiter_factory, n: int, q: int,
                                      objective="connectivity", *,
                                      max_leaves: int = MAX_VERIFY_LEAVES
                                      ) -> VerifyResult:
    """Play a Waiter strategy against every possible Client.

    ``waiter_factory`` builds a fresh strategy instance (they are stateful);
    each leaf of the (q+1)-ary choice tree is replayed from the start, which
    is cheap at the sizes where exhaustion is feasible.  True iff the
    objective holds on every leaf; otherwise the first failing game is
    returned as a transcript.  A strategy forfeit counts as a failure.
    """
    board = Board.complete_graph(n)
    rounds = board.size // (q + 1)
    if (q + 1) ** rounds > max_leaves:
        raise BudgetExceededError(
            f"(q+1)^rounds = {(q + 1) ** rounds} exceeds {max_leaves}")
    fn = OBJECTIVES[objective] if isinstance(objective, str) else objective

    class _Scripted:
        """Client that follows a fixed index sequence, least-id past it."""

        def __init__(self, picks):
            self.picks = picks
            self.depth = 0
            self.widths = []

        def describe(self):
            return {"name": "scripted", "params": {"picks": list(self.picks)}}

        def begin(self, state):
            pass

        def choose(self, state, offer):
            offer = sorted(int(e) for e in offer)
            idx = self.picks[self.depth] if self.depth < len(self.picks) else 0
            self.widths.append(len(offer))
            self.depth += 1
            return offer[idx]

        def observe(self, state, offer, choice):
            pass

    def play_leaf(picks):
        state = GameState(board, q, record_history=True)
        waiter = waiter_factory()
        client = _Scripted(picks)
        run = run_game(state, waiter, client)
        return state, run, client.widths

    leaves = 0
    stack = [()]
    while stack:
        picks = stack.pop()
        state, run, widths = play_leaf(picks)
        leaves += 1
        if leaves > max_leaves:
            raise BudgetExceededError(f"exceeded {max_leaves} leaves")
        if run.status == "forfeit" or not bool(fn(state)):
            tr = transcripts.from_game(run, waiter=waiter_factory(),
                                       client=_Scripted(picks))
            return VerifyResult(False, leaves, tr)
        # this play extends picks with index 0 everywhere; every other leaf
        # decomposes uniquely as zero-padding plus a first nonzero index
        for j in range(len(picks), len(widths)):
            pad = picks + (0,) * (j - len(picks))
            for idx in range(widths[j] - 1, 0, -1):
                stack.append(pad + (idx,))
    return VerifyResult(True, leaves)
