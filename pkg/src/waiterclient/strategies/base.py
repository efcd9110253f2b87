"""Strategy interfaces, staged cores, and the bias-reduction wrapper.

A Waiter strategy maps a state to an offer (or None once it has nothing left
to prescribe); a Client strategy maps (state, offer) to a chosen element.
Construction strategies are written as *cores* against the bias they were
designed for; ``BiasReducer`` runs such a core at any smaller actual bias by
keeping the surplus elements of each prescription virtually Waiter-claimed.
The core only ever sees the virtual game, where every prescribed element it
did not hand to Client counts as Waiter's.
"""

from __future__ import annotations

import numpy as np

from ..engine import ForfeitError, GameState


class Strategy:
    """Common plumbing: lifecycle hooks and a stable description."""

    name = "strategy"

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"name": self.name, "params": self.params()}

    def begin(self, state: GameState) -> None:
        pass

    def observe(self, state: GameState, offer, choice: int) -> None:
        pass


class Waiter(Strategy):
    def offer(self, state: GameState):
        raise NotImplementedError


class Client(Strategy):
    def choose(self, state: GameState, offer) -> int:
        raise NotImplementedError


class VirtualView:
    """What a wrapped core sees: its parent's view plus virtual Waiter claims.

    The parent is either the real GameState or another VirtualView, so
    reductions nest: an element is free here when it is free all the way
    down.  ``q`` is this layer's design bias, not the real game's.
    """

    __slots__ = ("parent", "state", "q", "vmask", "virtual_rounds")

    def __init__(self, parent, design_q: int):
        self.parent = parent
        self.state: GameState = parent.state if isinstance(parent, VirtualView) else parent
        self.q = design_q
        # allocated on first virtual claim; a reduction run at its design
        # bias never claims anything, and a full mask is large on big boards
        self.vmask: np.ndarray | None = None
        self.virtual_rounds = 0

    @property
    def board(self):
        return self.state.board

    @property
    def client_adj(self):
        return self.state.client_adj

    @property
    def client_degree(self):
        return self.state.client_degree

    @property
    def client_edges(self):
        return self.state.client_edges

    def is_free(self, eid: int) -> bool:
        if self.vmask is not None and self.vmask[eid]:
            return False
        return self.parent.is_free(eid)

    def free_mask(self, eids: np.ndarray) -> np.ndarray:
        eids = np.asarray(eids, dtype=np.int64)
        free = self.parent.free_mask(eids)
        if self.vmask is not None:
            free &= ~self.vmask[eids]
        return free

    def claim_virtually(self, eids) -> None:
        if self.vmask is None:
            self.vmask = np.zeros(self.state.board.size, dtype=bool)
        self.vmask[np.asarray(eids, dtype=np.int64)] = True


class StagedCore:
    """A construction recipe at its design bias.

    ``instruct`` returns the ids the proof would offer this round (design_q+1
    of them, or fewer only when done, in which case it returns None instead),
    in priority order: when run at a smaller real bias, only a prefix is
    actually offered.  ``observe`` is told the full instruction and Client's
    choice, so core bookkeeping lives entirely in the virtual game.
    """

    name = "core"
    design_q: int = 1

    def params(self) -> dict:
        return {}

    def begin(self, view: VirtualView) -> None:
        pass

    def instruct(self, view: VirtualView):
        raise NotImplementedError

    def observe(self, view: VirtualView, instructed, choice: int) -> None:
        pass

    def stage_checks(self) -> list:
        """(stage, ok, detail) postcondition records, filled during play."""
        return getattr(self, "_stage_checks", [])

    def record_check(self, stage: str, ok: bool, detail: str = "") -> None:
        if not hasattr(self, "_stage_checks"):
            self._stage_checks: list = []
        self._stage_checks.append((stage, bool(ok), detail))


class BiasReducer(Waiter):
    """Run a core designed for bias q' at any actual bias q <= q'.

    The first q+1 prescribed elements form the real offer; the rest are
    claimed virtually.  The core must prescribe free-in-view elements; a
    short prescription is a forfeit, per the reduction's contract.
    """

    def __init__(self, core: StagedCore):
        self.core = core
        self.view: VirtualView | None = None
        self._pending: np.ndarray | None = None

    @property
    def name(self):  # type: ignore[override]
        return self.core.name

    def params(self) -> dict:
        return self.core.params()

    def describe(self) -> dict:
        return {"name": self.core.name, "params": self.core.params()}

    def begin(self, state: GameState) -> None:
        if state.q > self.core.design_q:
            raise ForfeitError(
                "waiter", f"core designed for bias {self.core.design_q}, "
                f"game has larger bias {state.q}")
        self.view = VirtualView(state, self.core.design_q)
        self.core.begin(self.view)

    def offer(self, state: GameState):
        view = self.view
        instructed = self.core.instruct(view)
        if instructed is None:
            self._pending = None
            return None
        ids = np.asarray(instructed, dtype=np.int64)
        need = state.q + 1
        if len(ids) < need:
            raise ForfeitError(
                "waiter", f"core prescribed {len(ids)} elements, "
                f"round needs {need}", stage=getattr(self.core, "stage", None))
        uniq = len(np.unique(ids)) if len(ids) > 64 else len(set(ids.tolist()))
        if uniq != len(ids) or not view.free_mask(ids).all():
            raise ForfeitError(
                "waiter", "core prescribed a non-free or repeated element",
                stage=getattr(self.core, "stage", None))
        offer, surplus = ids[:need], ids[need:]
        if len(surplus):
            view.claim_virtually(surplus)
        self._pending = ids
        return offer

    def observe(self, state: GameState, offer, choice: int) -> None:
        view = self.view
        view.virtual_rounds += 1
        if self._pending is not None:
            self.core.observe(view, self._pending, choice)
            self._pending = None


class CoreReducer(StagedCore):
    """Run one core inside another at a smaller instruction size.

    A composite core can delegate rounds to an inner core designed for a
    larger bias: the inner prescription is trimmed to this layer's
    design_q + 1 elements and the surplus is claimed in a nested view, so
    the inner core keeps seeing its own design-bias game.
    """

    def __init__(self, inner: StagedCore, design_q: int):
        if design_q > inner.design_q:
            raise ForfeitError(
                "waiter", f"inner core designed for bias {inner.design_q}, "
                f"cannot serve larger bias {design_q}")
        self.inner = inner
        self.design_q = design_q
        self.name = inner.name
        self.subview: VirtualView | None = None
        self._pending: np.ndarray | None = None

    def params(self) -> dict:
        return self.inner.params()

    def begin(self, view) -> None:
        self.subview = VirtualView(view, self.inner.design_q)
        self.inner.begin(self.subview)

    def instruct(self, view):
        sub = self.subview
        instructed = self.inner.instruct(sub)
        if instructed is None:
            self._pending = None
            return None
        ids = np.asarray(instructed, dtype=np.int64)
        need = self.design_q + 1
        if len(ids) < need:
            raise ForfeitError(
                "waiter", f"inner core prescribed {len(ids)} elements, "
                f"layer needs {need}", stage=getattr(self.inner, "stage", None))
        uniq = len(np.unique(ids)) if len(ids) > 64 else len(set(ids.tolist()))
        if uniq != len(ids) or not sub.free_mask(ids).all():
            raise ForfeitError(
                "waiter", "inner core prescribed a non-free or repeated element",
                stage=getattr(self.inner, "stage", None))
        if len(ids) > need:
            sub.claim_virtually(ids[need:])
        self._pending = ids
        return ids[:need]

    def observe(self, view, instructed, choice: int) -> None:
        self.subview.virtual_rounds += 1
        if self._pending is not None:
            self.inner.observe(self.subview, self._pending, choice)
            self._pending = None

    def done(self) -> bool:
        return self._pending is None

    def stage_checks(self) -> list:
        return self.inner.stage_checks()


def reduce_bias(core: StagedCore, actual_q: int | None = None) -> BiasReducer:
    """Waiter strategy running the core at any bias up to its design bias.

    Passing actual_q validates the intended game bias up front; otherwise
    the check happens when the game begins.
    """
    if actual_q is not None and actual_q > core.design_q:
        raise ForfeitError(
            "waiter", f"core designed for bias {core.design_q}, "
            f"asked to play at larger bias {actual_q}")
    return BiasReducer(core)
