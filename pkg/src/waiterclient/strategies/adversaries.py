"""Baseline strategies used as opponents in tests, sweeps and sessions.

None of these implement a guarantee; they exist to attack the strategies
that do.  Construction-side tests run against the whole suite.
"""

from __future__ import annotations

import numpy as np

from ..engine import FREE, GameState
from .base import Client, Waiter


class LexClient(Client):
    """Always keeps the least offered element id."""

    name = "lex"

    def choose(self, state: GameState, offer) -> int:
        return int(min(offer))


class RandomClient(Client):
    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def params(self) -> dict:
        return {"seed": self.seed}

    def choose(self, state: GameState, offer) -> int:
        return int(offer[self.rng.integers(len(offer))])


class GreedyMinDegreeClient(Client):
    """Keeps the edge whose endpoints have the smallest Client degrees.

    Starves any plan that needs Client to concentrate edges.
    """

    name = "greedy_min_degree"

    def choose(self, state: GameState, offer) -> int:
        deg = state.client_degree
        if deg is None:
            return int(min(offer))
        best = None
        for eid in sorted(int(x) for x in offer):
            u, v = state.board.edge_pair(eid)
            key = deg[u] + deg[v]
            if best is None or key < best[0]:
                best = (key, eid)
        return best[1]


class GreedyMaxDegreeClient(Client):
    """Opposite bias: piles edges onto already-busy vertices."""

    name = "greedy_max_degree"

    def choose(self, state: GameState, offer) -> int:
        deg = state.client_degree
        if deg is None:
            return int(max(offer))
        best = None
        for eid in sorted(int(x) for x in offer):
            u, v = state.board.edge_pair(eid)
            key = deg[u] + deg[v]
            if best is None or key > best[0]:
                best = (key, eid)
        return best[1]


class LexWaiter(Waiter):
    """Prescribes nothing; the engine plays least free elements for it."""

    name = "lex"

    def offer(self, state: GameState):
        return None


class RandomWaiter(Waiter):
    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def params(self) -> dict:
        return {"seed": self.seed}

    def offer(self, state: GameState):
        free = state.own.ids_of(FREE)
        pick = self.rng.choice(len(free), size=state.offer_size(), replace=False)
        return [int(free[i]) for i in pick]


class StarWaiter(Waiter):
    """Offers free edges at the vertex of least Client degree.

    The natural opponent of a Client trying to keep some degree low: it
    hammers whichever vertex looks most neglected, spilling to the next
    vertices when the first star runs out of free edges.
    """

    name = "star_min_degree"

    def offer(self, state: GameState):
        board = state.board
        if not board.is_graph:
            return None
        want = state.offer_size()
        order = np.argsort(state.client_degree, kind="stable")
        out: list[int] = []
        seen: set[int] = set()
        others = np.arange(board.n, dtype=np.int64)
        for v in order:
            ids = board.star_ids(int(v), others[others != v])
            mask = state.own.owners(ids) == FREE
            for eid in ids[mask]:
                e = int(eid)
                if e not in seen:
                    seen.add(e)
                    out.append(e)
                    if len(out) == want:
                        return out
        return out if len(out) == want else None
