"""Strategy library: construction Waiters, avoidance Clients, baselines.

Strategies are addressable by stable string names for the CLI, sweeps and
the play service; ``make_waiter`` / ``make_client`` are the only factories
those layers use.
"""

from __future__ import annotations

from ..engine import ParameterError
from .base import (BiasReducer, Client, StagedCore, Strategy, VirtualView,
                   Waiter, reduce_bias)
from . import adversaries


def make_waiter(name: str, n: int | None = None, q: int | None = None, *,
                eta: int | None = None, d: int | None = None,
                k: int | None = None, seed: int = 0) -> Waiter:
    if name == "lex":
        return adversaries.LexWaiter()
    if name == "random":
        return adversaries.RandomWaiter(seed)
    if name == "star_min_degree":
        return adversaries.StarWaiter()
    if n is None or q is None:
        raise ParameterError(f"waiter {name!r} needs n and q")
    if name == "big_component":
        from .building import waiter_big_component
        return waiter_big_component(n, q)
    if name == "connectivity":
        from .building import waiter_connectivity
        return waiter_connectivity(n, q)
    if name == "path_doubling":
        from .building import waiter_path_doubling
        return waiter_path_doubling(n, q)
    if name == "long_cycle":
        from .building import waiter_long_cycle
        if eta is None:
            eta = n - q
        return waiter_long_cycle(n, q, eta)
    if name == "half_expander":
        from .expanders import waiter_half_expander_split
        return waiter_half_expander_split(n, q, d if d is not None else 2)
    if name == "expander_cycles":
        from .expanders import waiter_expander_cycles
        return waiter_expander_cycles(n, d if d is not None else 4, q)
    if name == "hamiltonian_expander":
        from .expanders import waiter_hamiltonian_expander
        return waiter_hamiltonian_expander(n, q)
    if name == "pancyclic":
        from .expanders import waiter_pancyclic
        return waiter_pancyclic(n, q)
    if name == "k_connected":
        from .building import waiter_k_connected
        return waiter_k_connected(n, q, k if k is not None else 2)
    raise ParameterError(f"unknown waiter strategy {name!r}")


def make_client(name: str, n: int | None = None, q: int | None = None, *,
                m: int | None = None, r: int | None = None,
                seed: int = 0) -> Client:
    if name == "lex":
        return adversaries.LexClient()
    if name == "random":
        return adversaries.RandomClient(seed)
    if name == "greedy_min_degree":
        return adversaries.GreedyMinDegreeClient()
    if name == "greedy_max_degree":
        return adversaries.GreedyMaxDegreeClient()
    if n is None or q is None:
        raise ParameterError(f"client {name!r} needs n and q")
    if name == "avoid_cycles":
        from .avoidance import client_avoid_cycles
        return client_avoid_cycles(n, q, m if m is not None else 3)
    if name == "avoid_big_component":
        from .avoidance import client_avoid_big_component
        return client_avoid_big_component(n, q, r if r is not None else 1)
    if name == "min_degree":
        from .avoidance import client_min_degree
        return client_min_degree(n, q)
    raise ParameterError(f"unknown client strategy {name!r}")


WAITER_NAMES = ("big_component", "connectivity", "path_doubling", "long_cycle",
                "half_expander", "expander_cycles", "hamiltonian_expander",
                "pancyclic", "k_connected", "lex", "random", "star_min_degree")

CLIENT_NAMES = ("avoid_cycles", "avoid_big_component", "min_degree",
                "lex", "random", "greedy_min_degree", "greedy_max_degree")

__all__ = ["BiasReducer", "Client", "StagedCore", "Strategy", "VirtualView",
           "Waiter", "reduce_bias", "adversaries", "make_waiter",
           "make_client", "WAITER_NAMES", "CLIENT_NAMES"]
