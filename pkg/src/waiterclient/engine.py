"""Game engine for biased offer-and-claim (Waiter-Client) games.

One round at bias q: Waiter offers exactly q+1 free elements, Client keeps
one, Waiter takes the rest.  When fewer than q+1 free elements remain the
engine assigns all of them to Waiter as a terminal sweep, recorded as a
pseudo-round with an empty choice.  The game is over when no element is free.

``GameState`` is a value: ``clone`` gives an independent copy and the public
``apply_round`` never mutates its argument.  The internal in-place variant is
what the game loop uses; at the largest board sizes cloning per round would
be prohibitive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .board import Board

FREE = 0
WAITER = 1
CLIENT = 2

# Boards with more elements than this use the bit-packed ownership store.
DENSE_OWNERSHIP_LIMIT = 600_000_000


class GameError(Exception):
    """Base class for rule violations and engine failures."""


class OfferSizeError(GameError):
    """Offer does not contain exactly min(q+1, free) distinct elements."""


class ElementNotFreeError(GameError):
    """Offer contains an element that is not free."""


class ChoiceNotOfferedError(GameError):
    """Client chose an element outside the current offer."""


class BudgetExceededError(GameError):
    """An exact computation was asked for beyond its configured budget."""


class ParameterError(ValueError):
    """Strategy or game parameters rejected up front."""


class ForfeitError(GameError):
    """Raised by a strategy that cannot carry out its prescribed move.

    Attributes:
        side: "waiter" or "client".
        stage: label of the stage that failed, if the strategy is staged.
        reason: human-readable description.
        certificate: optional machine-checkable evidence (e.g. a fully
            Waiter-claimed set in a transversal game).
    """

    def __init__(self, side: str, reason: str, stage: str | None = None,
                 certificate=None):
        super().__init__(f"{side} forfeits" + (f" in stage {stage}" if stage else "")
                         + f": {reason}")
        self.side = side
        self.stage = stage
        self.reason = reason
        self.certificate = certificate


class DenseOwnership:
    """Per-element owner byte; the normal store."""

    __slots__ = ("arr",)

    def __init__(self, size: int, _arr: np.ndarray | None = None):
        self.arr = np.zeros(size, dtype=np.uint8) if _arr is None else _arr

    @property
    def size(self) -> int:
        return len(self.arr)

    def owner(self, eid: int) -> int:
        return int(self.arr[eid])

    def owners(self, eids: np.ndarray) -> np.ndarray:
        return self.arr[np.asarray(eids, dtype=np.int64)]

    def all_free(self, eids: np.ndarray) -> bool:
        return not self.arr[np.asarray(eids, dtype=np.int64)].any()

    def free_mask(self, eids: np.ndarray) -> np.ndarray:
        return self.arr[np.asarray(eids, dtype=np.int64)] == FREE

    def claim_waiter(self, eids: np.ndarray) -> None:
        self.arr[np.asarray(eids, dtype=np.int64)] = WAITER

    def claim_client(self, eid: int) -> None:
        self.arr[eid] = CLIENT

    def free_ids_in(self, start: int, stop: int) -> np.ndarray:
        return np.nonzero(self.arr[start:stop] == FREE)[0] + start

    def count(self, owner: int) -> int:
        return int(np.count_nonzero(self.arr == owner))

    def ids_of(self, owner: int) -> np.ndarray:
        return np.nonzero(self.arr == owner)[0]

    def clone(self) -> "DenseOwnership":
        return DenseOwnership(0, _arr=self.arr.copy())

    def key(self) -> bytes:
        return self.arr.tobytes()


class PackedOwnership:
    """One claimed-bit per element plus an explicit Client id set.

    Used for boards too large for a byte per element.  Client holdings are
    sparse in every game we play at that scale (one element per round).
    """

    __slots__ = ("nbits", "bits", "client")

    def __init__(self, size: int, _bits=None, _client=None):
        self.nbits = size
        self.bits = (np.zeros((size + 7) // 8, dtype=np.uint8)
                     if _bits is None else _bits)
        self.client: set[int] = set() if _client is None else _client

    @property
    def size(self) -> int:
        return self.nbits

    def owner(self, eid: int) -> int:
        if not (self.bits[eid >> 3] >> (eid & 7)) & 1:
            return FREE
        return CLIENT if eid in self.client else WAITER

    def owners(self, eids: np.ndarray) -> np.ndarray:
        eids = np.asarray(eids, dtype=np.int64)
        claimed = (self.bits[eids >> 3] >> (eids & 7).astype(np.uint8)) & 1
        out = claimed.astype(np.uint8)  # 0 free, 1 claimed -> refine to client
        if self.client:
            cl = np.fromiter(self.client, dtype=np.int64, count=len(self.client))
            out[np.isin(eids, cl)] = CLIENT
        return out

    def all_free(self, eids: np.ndarray) -> bool:
        eids = np.asarray(eids, dtype=np.int64)
        return not ((self.bits[eids >> 3] >> (eids & 7).astype(np.uint8)) & 1).any()

    def free_mask(self, eids: np.ndarray) -> np.ndarray:
        # the claimed bit alone decides freeness; no Client-set lookup needed
        eids = np.asarray(eids, dtype=np.int64)
        return ((self.bits[eids >> 3] >> (eids & 7).astype(np.uint8)) & 1) == 0

    def claim_waiter(self, eids: np.ndarray) -> None:
        eids = np.asarray(eids, dtype=np.int64)
        if len(eids) <= 1024:
            np.bitwise_or.at(self.bits, eids >> 3,
                             (np.uint8(1) << (eids & 7).astype(np.uint8)))
            return
        # bulk path: ufunc.at is slow, so fold duplicate byte indices with
        # a sort + reduceat instead
        eids = np.sort(eids)
        bytes_idx = eids >> 3
        masks = (np.uint8(1) << (eids & 7).astype(np.uint8))
        starts = np.flatnonzero(np.r_[True, bytes_idx[1:] != bytes_idx[:-1]])
        self.bits[bytes_idx[starts]] |= np.bitwise_or.reduceat(masks, starts)

    def claim_client(self, eid: int) -> None:
        self.bits[eid >> 3] |= np.uint8(1 << (eid & 7))
        self.client.add(eid)

    def free_ids_in(self, start: int, stop: int) -> np.ndarray:
        ids = np.arange(start, stop, dtype=np.int64)
        claimed = (self.bits[ids >> 3] >> (ids & 7).astype(np.uint8)) & 1
        return ids[claimed == 0]

    def count(self, owner: int) -> int:
        # padding bits beyond nbits are never set, so they don't contribute
        claimed = int(np.unpackbits(self.bits).sum())
        if owner == FREE:
            return self.nbits - claimed
        if owner == CLIENT:
            return len(self.client)
        return claimed - len(self.client)

    def ids_of(self, owner: int) -> np.ndarray:
        if owner == CLIENT:
            return np.array(sorted(self.client), dtype=np.int64)
        raise BudgetExceededError("packed ownership only enumerates Client ids")

    def clone(self) -> "PackedOwnership":
        return PackedOwnership(self.nbits, _bits=self.bits.copy(),
                               _client=set(self.client))

    def key(self) -> bytes:
        raise BudgetExceededError("packed ownership has no canonical key")


def _make_ownership(size: int):
    if size > DENSE_OWNERSHIP_LIMIT:
        return PackedOwnership(size)
    return DenseOwnership(size)


class GameState:
    """Full state of one game: board, bias, ownership and Client's graph.

    Attributes:
        board: the element set in play.
        q: Waiter's bias; each full offer has q+1 elements.
        round_index: number of completed real rounds (the terminal sweep
            does not count).
        history: list of (offer_ids_sorted, choice_id_or_None) when
            recording is on, else None.
    """

    __slots__ = ("board", "q", "own", "free_count", "round_index", "history",
                 "client_edges", "client_adj", "client_degree", "_dump_ptr")

    def __init__(self, board: Board, q: int, record_history: bool = True):
        if q < 1:
            raise ParameterError(f"bias q must be >= 1, got {q}")
        if board.size < 1:
            raise ParameterError("board has no elements")
        self.board = board
        self.q = q
        self.own = _make_ownership(board.size)
        self.free_count = board.size
        self.round_index = 0
        self.history: list | None = [] if record_history else None
        self.client_edges: list[int] = []
        if board.is_graph:
            self.client_adj: list[list[int]] | None = [[] for _ in range(board.n)]
            self.client_degree: np.ndarray | None = np.zeros(board.n, dtype=np.int64)
        else:
            self.client_adj = None
            self.client_degree = None
        self._dump_ptr = 0
        # a board smaller than one full offer is swept outright: Client
        # only ever keeps an element out of a complete q+1 offer
        if self.free_count <= q:
            self._sweep()

    # -- read access ---------------------------------------------------

    @property
    def terminal(self) -> bool:
        return self.free_count == 0

    def owner(self, eid: int) -> int:
        return self.own.owner(eid)

    def is_free(self, eid: int) -> bool:
        return self.own.owner(eid) == FREE

    def free_mask(self, eids: np.ndarray) -> np.ndarray:
        """Boolean mask over eids: True where the element is unclaimed."""
        return self.own.free_mask(eids)

    def offer_size(self) -> int:
        return min(self.q + 1, self.free_count)

    def client_edge_pairs(self) -> list[tuple[int, int]]:
        return [self.board.edge_pair(e) for e in self.client_edges]

    def waiter_edge_ids(self) -> np.ndarray:
        return self.own.ids_of(WAITER)

    def dump_offer(self) -> list[int]:
        """The lexicographically least free elements, as a full offer."""
        want = self.offer_size()
        out: list[int] = []
        p = self._dump_ptr
        size = self.board.size
        while len(out) < want and p < size:
            chunk = self.own.free_ids_in(p, min(p + 65536, size))
            for eid in chunk[: want - len(out)]:
                out.append(int(eid))
            if len(out) < want:
                p = min(p + 65536, size)
        # pointer may only advance past fully claimed prefix
        self._dump_ptr = out[0] if out else size
        if len(out) != want:
            raise GameError("free count inconsistent with ownership store")
        return out

    def clone(self) -> "GameState":
        g = GameState.__new__(GameState)
        g.board = self.board
        g.q = self.q
        g.own = self.own.clone()
        g.free_count = self.free_count
        g.round_index = self.round_index
        g.history = list(self.history) if self.history is not None else None
        g.client_edges = list(self.client_edges)
        g.client_adj = ([list(a) for a in self.client_adj]
                        if self.client_adj is not None else None)
        g.client_degree = (self.client_degree.copy()
                           if self.client_degree is not None else None)
        g._dump_ptr = self._dump_ptr
        return g

    # -- mutation ------------------------------------------------------

    def _validate_offer(self, offer) -> np.ndarray:
        ids = np.asarray(offer, dtype=np.int64)
        want = self.offer_size()
        if len(ids) != want:
            raise OfferSizeError(
                f"offer has {len(ids)} elements, expected {want}")
        if len(ids) > 1:
            uniq = len(np.unique(ids)) if len(ids) > 64 else len(set(ids.tolist()))
            if uniq != len(ids):
                raise OfferSizeError("offer repeats an element")
        if ids.min() < 0 or ids.max() >= self.board.size:
            raise ElementNotFreeError("offer contains an id outside the board")
        if not self.own.all_free(ids):
            raise ElementNotFreeError("offer contains a non-free element")
        return ids

    def apply_round_inplace(self, offer, choice: int) -> "GameState":
        """Apply one real round; sweeps the tail if fewer than q+1 remain."""
        if self.terminal:
            raise GameError("game is over")
        ids = self._validate_offer(offer)
        if choice is None:
            raise ChoiceNotOfferedError("choice is required for a real round")
        choice = int(choice)
        # membership test cheap for small offers, vectorized for bulk ones
        if len(ids) <= 64:
            if choice not in ids:
                raise ChoiceNotOfferedError(f"choice {choice} not in offer")
        elif not (ids == choice).any():
            raise ChoiceNotOfferedError(f"choice {choice} not in offer")
        self.own.claim_waiter(ids)
        self.own.claim_client(choice)
        self.free_count -= len(ids)
        self.round_index += 1
        self.client_edges.append(choice)
        if self.client_adj is not None:
            u, v = self.board.edge_pair(choice)
            self.client_adj[u].append(v)
            self.client_adj[v].append(u)
            self.client_degree[u] += 1
            self.client_degree[v] += 1
        if self.history is not None:
            self.history.append((tuple(int(x) for x in np.sort(ids)), choice))
        if 0 < self.free_count <= self.q:
            self._sweep()
        return self

    def _sweep(self) -> None:
        swept = self.own.free_ids_in(0, self.board.size)
        if len(swept) != self.free_count:
            raise GameError("free count inconsistent at sweep")
        self.own.claim_waiter(swept)
        self.free_count = 0
        if self.history is not None:
            self.history.append((tuple(int(x) for x in swept), None))


def new_game(board: Board | int, q: int, *, abstract_size: int | None = None,
             record_history: bool = True) -> GameState:
    """Fresh game on K_n (pass n or a Board) or an abstract element set."""
    if isinstance(board, Board):
        b = board
    elif abstract_size is not None:
        raise ParameterError("pass either a vertex count or abstract_size")
    else:
        b = Board.complete_graph(int(board))
    return GameState(b, q, record_history=record_history)


def new_abstract_game(size: int, q: int, *, record_history: bool = True) -> GameState:
    return GameState(Board.abstract(size), q, record_history=record_history)


def apply_round(state: GameState, offer, choice: int) -> GameState:
    """Pure form of one round: returns an advanced copy, argument untouched."""
    return state.clone().apply_round_inplace(offer, choice)


@dataclass
class ForfeitInfo:
    side: str
    round_index: int
    stage: str | None
    reason: str
    certificate: object = None


@dataclass
class GameRun:
    """Outcome of driving a game with two strategies.

    status is "complete" (board exhausted), "stopped" (waiter ran out of
    prescribed offers and the caller asked to stop there, or max_rounds was
    hit), or "forfeit".
    """

    state: GameState
    status: str
    rounds: int
    forfeit: Optional[ForfeitInfo] = None


def run_game(state: GameState, waiter, client, *,
             stop_when_waiter_done: bool = False,
             max_rounds: int | None = None) -> GameRun:
    """Drive a game to the end (or to the waiter's last prescribed offer).

    ``waiter.offer(state)`` must return exactly min(q+1, free) free element
    ids, or None once it has no further prescription; in the latter case the
    engine either stops (if asked) or plays the least free elements itself.
    """
    waiter.begin(state)
    client.begin(state)
    waiter_done = False
    while not state.terminal:
        if max_rounds is not None and state.round_index >= max_rounds:
            return GameRun(state, "stopped", state.round_index)
        offer = None
        if not waiter_done:
            try:
                offer = waiter.offer(state)
            except ForfeitError as f:
                return GameRun(state, "forfeit", state.round_index,
                               ForfeitInfo("waiter", state.round_index, f.stage,
                                           f.reason, f.certificate))
        if offer is None:
            waiter_done = True
            if stop_when_waiter_done:
                return GameRun(state, "stopped", state.round_index)
            offer = state.dump_offer()
        try:
            choice = client.choose(state, offer)
        except ForfeitError as f:
            return GameRun(state, "forfeit", state.round_index,
                           ForfeitInfo("client", state.round_index, f.stage,
                                       f.reason, f.certificate))
        state.apply_round_inplace(offer, choice)
        waiter.observe(state, offer, choice)
        client.observe(state, offer, choice)
    return GameRun(state, "complete", state.round_index)


def play_game(state: GameState, waiter, client):
    """Play until the board is exhausted and return a replayable transcript."""
    if state.history is None:
        raise ParameterError("play_game needs a history-recording state")
    from . import transcripts

    run = run_game(state, waiter, client, stop_when_waiter_done=False)
    return transcripts.from_game(run, waiter, client)
