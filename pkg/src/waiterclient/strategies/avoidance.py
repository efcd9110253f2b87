"""Client strategies: cycle avoidance, component capping, degree starving.

The two potential players are thin wirings of ``MinimizePotentialClient``
over the families realizing their targets; the min-degree client is a
direct two-stage play that sacrifices a quarter of the board to locate one
well-starved vertex.
"""

from __future__ import annotations

import warnings

import numpy as np

from ..board import Board
from ..engine import WAITER, GameState
from ..families import (DEFAULT_SET_BUDGET, MinimizePotentialClient,
                        SetFamily, build_cycle_family,
                        build_path_tuple_family, cycle_family_size)
from .base import Client


def client_avoid_cycles(n: int, q: int, m: int = 3) -> MinimizePotentialClient:
    """Potential player avoiding Client cycles of length m and beyond.

    The family stops at Client's final edge count (longer cycles can never
    fill) and shrinks further to the enumeration budget when it must; the
    family label records the cut.  A threshold above n leaves nothing to
    avoid and plays as the bare potential client over an empty family.
    """
    if m > n:
        board = Board.complete_graph(n)
        fam = SetFamily(board, [], label=f"cycles(n={n},m={m},empty)")
        return MinimizePotentialClient(fam)
    top = min(n, max(m, n * (n - 1) // 2 // (q + 1)))
    while top > m and cycle_family_size(n, m, top) > DEFAULT_SET_BUDGET:
        top -= 1
    fam = build_cycle_family(n, m, max_len=top)
    return MinimizePotentialClient(fam)


def client_avoid_big_component(n: int, q: int, r: int = 1) -> MinimizePotentialClient:
    """Potential player starving connected path systems, capping components.

    Runs over the ordered r-tuples of paths with tree unions; any component
    of order s at game end contains (s/4)^(2r) such tuples, so keeping the
    potential below its start caps s.  Enumeration-scale only.
    """
    return MinimizePotentialClient(build_path_tuple_family(n, r))


class MinDegreeClient(Client):
    """Two-stage Client leaving some vertex at degree at most one.

    Stage I takes the least offered edge while fewer than n/4 vertices
    carry Client edges.  The first time that count is reached, the
    Client-isolated vertex with the largest Waiter degree becomes the
    protected vertex; from then on every pick avoids its edges whenever the
    offer allows.  Waiter has by then sunk enough edges at the protected
    vertex that he cannot fill two all-protected offers, provided the bias
    is at least 0.49 n; below that the constructor warns and the guarantee
    lapses, though play proceeds unchanged.
    """

    name = "min_degree"

    def __init__(self, n: int, q: int):
        if q < 0.49 * n:
            warnings.warn(
                f"degree guarantee needs bias >= 0.49*n = {0.49 * n:.1f}, "
                f"got {q}; playing without it", stacklevel=3)
        self.n = n
        self.q = q

    def params(self) -> dict:
        return {"n": self.n, "q": self.q}

    def begin(self, state: GameState) -> None:
        self.x: int | None = None
        self.entry: dict | None = None

    def _waiter_degrees(self, state: GameState) -> np.ndarray:
        eids = np.arange(state.board.size, dtype=np.int64)
        owned = eids[state.own.owners(eids) == WAITER]
        us, vs = state.board.edge_pairs(owned)
        return np.bincount(np.concatenate((us, vs)), minlength=self.n)

    def _enter_stage_two(self, state: GameState) -> None:
        n, q = self.n, self.q
        deg = state.client_degree[:n]
        k = int(np.count_nonzero(deg))
        threshold = -(-n // 4)
        # one pick adds at most two touched vertices, so the count cannot
        # overshoot the threshold by more than one
        assert threshold <= k <= threshold + 1, (k, threshold)
        wdeg = self._waiter_degrees(state)
        isolated = np.flatnonzero(deg == 0)
        self.x = int(isolated[np.argmax(wdeg[isolated])])
        mean = float(wdeg[isolated].mean())
        floor = k * (q - k + 2) / (2 * (n - k))
        assert mean >= floor - 1e-9, (mean, floor)
        self.entry = {"round": state.round_index, "touched": k,
                      "protected": self.x,
                      "waiter_degree_mean": mean, "waiter_degree_floor": floor}

    def choose(self, state: GameState, offer) -> int:
        if self.x is None:
            deg = state.client_degree[:self.n]
            if int(np.count_nonzero(deg)) >= -(-self.n // 4):
                self._enter_stage_two(state)
        offer = [int(e) for e in offer]
        if self.x is None:
            return min(offer)
        x = self.x
        clear = [e for e in offer if x not in state.board.edge_pair(e)]
        return min(clear) if clear else min(offer)


def client_min_degree(n: int, q: int) -> MinDegreeClient:
    return MinDegreeClient(n, q)
