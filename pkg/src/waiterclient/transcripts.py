"""Replayable game transcripts with a canonical JSON form.

A transcript records the board, the bias, strategy descriptions, every round
(offer plus Client's choice, with the terminal sweep as a choice of null) and
the outcome.  Serialization is canonical: sorted keys, no whitespace.  Two
transcripts of the same game are byte-identical, which is what the replay
check and any external client rely on.

Edges of K_n are written as [u, v] pairs with u < v; abstract elements as
plain ids.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .board import Board
from .engine import GameError, GameRun, GameState, new_game

FORMAT_VERSION = 1


class ReplayError(GameError):
    """A transcript does not replay to the game it claims to record."""


def encode_element(board: Board, eid: int):
    if board.is_graph:
        u, v = board.edge_pair(eid)
        return [u, v]
    return int(eid)


def decode_element(board: Board, obj) -> int:
    if board.is_graph:
        u, v = obj
        return board.edge_id(int(u), int(v))
    return int(obj)


def describe_strategy(strategy) -> dict:
    describe = getattr(strategy, "describe", None)
    if describe is not None:
        return describe()
    return {"name": type(strategy).__name__.lower(), "params": {}}


@dataclass
class Transcript:
    board: Board
    q: int
    waiter: dict
    client: dict
    rounds: list  # [(offer_ids_sorted, choice_or_None), ...]
    status: str
    forfeit: dict | None = None

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "board": self.board.describe(),
            "q": self.q,
            "waiter": self.waiter,
            "client": self.client,
            "rounds": [
                [[encode_element(self.board, e) for e in offer],
                 None if choice is None else encode_element(self.board, choice)]
                for offer, choice in self.rounds
            ],
            "status": self.status,
            "forfeit": self.forfeit,
        }

    def dumps(self) -> str:
        return canonical_json(self.to_dict())

    @property
    def client_element_count(self) -> int:
        return sum(1 for _, choice in self.rounds if choice is not None)


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def from_game(run: GameRun, waiter=None, client=None) -> Transcript:
    state = run.state
    if state.history is None:
        raise GameError("state was created without history recording")
    forfeit = None
    if run.forfeit is not None:
        forfeit = {
            "side": run.forfeit.side,
            "round": run.forfeit.round_index,
            "stage": run.forfeit.stage,
            "reason": run.forfeit.reason,
        }
    return Transcript(
        board=state.board,
        q=state.q,
        waiter=describe_strategy(waiter) if waiter is not None else {"name": "external", "params": {}},
        client=describe_strategy(client) if client is not None else {"name": "external", "params": {}},
        rounds=list(state.history),
        status=run.status,
        forfeit=forfeit,
    )


def loads(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "rounds" not in doc:
        raise ReplayError("not a transcript document")
    if doc.get("version") != FORMAT_VERSION:
        raise ReplayError(f"unsupported transcript version {doc.get('version')!r}")
    return doc


def replay(doc: dict | str) -> GameState:
    """Re-run a transcript through the engine, verifying every round.

    Returns the final state.  Raises ReplayError if any recorded round is
    illegal or if the recorded terminal sweep differs from the engine's.
    """
    if isinstance(doc, str):
        doc = loads(doc)
    board = Board.from_description(doc["board"])
    state = new_game(board, int(doc["q"]), record_history=True)
    for offer_enc, choice_enc in doc["rounds"]:
        if choice_enc is None:
            continue  # sweeps are produced by the engine, checked below
        offer = [decode_element(board, o) for o in offer_enc]
        choice = decode_element(board, choice_enc)
        try:
            state.apply_round_inplace(offer, choice)
        except GameError as exc:
            raise ReplayError(f"round {state.round_index}: {exc}") from exc
    recorded = [
        (tuple(sorted(decode_element(board, o) for o in offer_enc)),
         None if choice_enc is None else decode_element(board, choice_enc))
        for offer_enc, choice_enc in doc["rounds"]
    ]
    if state.history != recorded:
        raise ReplayError("recorded rounds disagree with engine replay")
    if doc.get("status") == "complete" and not state.terminal:
        raise ReplayError("transcript claims completion but board is not exhausted")
    return state


def verify_roundtrip(transcript: Transcript) -> bool:
    """Serialize, replay, re-serialize; True iff the bytes match."""
    text = transcript.dumps()
    state = replay(text)
    again = Transcript(
        board=state.board,
        q=state.q,
        waiter=transcript.waiter,
        client=transcript.client,
        rounds=list(state.history),
        status=transcript.status,
        forfeit=transcript.forfeit,
    )
    return again.dumps() == text
