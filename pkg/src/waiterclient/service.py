"""Interactive play sessions over HTTP for the browser client.

One session holds one live game: a human on one side, an engine strategy on
the other, rules enforced by the same engine the batch harness uses.  Every
state change appends an event with a gapless per-session sequence number;
clients can long-poll or stream those events.  All payloads are canonical
JSON (sorted keys, no insignificant whitespace), matching the transcript
format, so byte equality is meaningful everywhere.

Sessions live in memory; with a persist directory each event is also
appended to ``<id>.events`` as one JSON line, which is enough to audit or
replay a crashed run.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

import numpy as np
from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response, StreamingResponse

from . import graphs as gr
from .board import Board
from .engine import (ChoiceNotOfferedError, ElementNotFreeError, ForfeitError,
                     GameError, GameState, OfferSizeError, ParameterError)
from .strategies import CLIENT_NAMES, WAITER_NAMES, make_client, make_waiter
from .transcripts import Transcript, canonical_json, describe_strategy

LONG_POLL_CAP = 30.0
SPECTRUM_LIMIT = 18  # exact cycle spectrum in analysis up to this many vertices


class ApiError(Exception):
    """Protocol violation with a stable kebab-case code."""

    def __init__(self, code: str, detail: str, status: int = 400):
        super().__init__(detail)
        self.code = code
        self.detail = detail
        self.status = status


class CanonicalJSONResponse(JSONResponse):
    def render(self, content) -> bytes:
        return canonical_json(content).encode()


def _auto_waiter(n: int, q: int):
    """Engine Waiter for a human Client: the richest construction whose
    preflight admits (n, q), else plain lexicographic offers."""
    for name in ("pancyclic", "hamiltonian_expander", "connectivity",
                 "big_component"):
        try:
            return name, make_waiter(name, n=n, q=q)
        except ParameterError:
            continue
    return "lex", make_waiter("lex")


class Session:
    def __init__(self, sid: str, n: int, q: int, human: str,
                 engine_name: str, engine, persist_path: Path | None):
        self.id = sid
        self.n = n
        self.q = q
        self.human = human
        self.engine_name = engine_name
        self.engine = engine
        self.state = GameState(Board.complete_graph(n), q,
                               record_history=True)
        self.status = "active"
        self.forfeit = None
        self.pending: list[int] | None = None
        self.engine_done = False
        self.events: list[dict] = []
        self.cond = threading.Condition()
        self.lock = threading.RLock()
        self.persist_path = persist_path

    # -- events --------------------------------------------------------

    def emit(self, type_: str, **payload) -> None:
        with self.cond:
            event = {"seq": len(self.events), "type": type_, **payload}
            self.events.append(event)
            if self.persist_path is not None:
                with self.persist_path.open("a") as fh:
                    fh.write(canonical_json(event) + "\n")
            self.cond.notify_all()

    def encode(self, eid: int) -> list:
        u, v = self.state.board.edge_pair(int(eid))
        return [u, v]

    # -- engine driving ------------------------------------------------

    def next_engine_offer(self) -> None:
        """When the human is Client: compute and publish the next offer."""
        if self.state.terminal:
            self._finish()
            return
        offer = None
        if not self.engine_done:
            try:
                offer = self.engine.offer(self.state)
            except ForfeitError as f:
                self.status = "forfeit"
                self.forfeit = {"side": f.side, "round": self.state.round_index,
                                "stage": f.stage, "reason": f.reason}
                self.emit("forfeit", **self.forfeit)
                return
        if offer is None:
            self.engine_done = True
            offer = self.state.dump_offer()
        self.pending = sorted(int(e) for e in offer)
        self.emit("offer", round=self.state.round_index,
                  offer=[self.encode(e) for e in self.pending])

    def _finish(self) -> None:
        self.status = "complete"
        self.emit("end", status="complete", report=self.report())

    def report(self) -> dict:
        state = self.state
        g = gr.SimpleGraph.from_game(state)
        sizes, connected = gr.component_profile(g)
        out = {
            "round_index": state.round_index,
            "free_count": state.free_count,
            "client_edge_count": len(state.client_edges),
            "client_edges": sorted(self.encode(e) for e in state.client_edges),
            "components": sizes[:8],
            "connected": connected,
            "min_degree": int(state.client_degree.min()),
            "max_degree": int(state.client_degree.max()),
        }
        if self.n <= SPECTRUM_LIMIT:
            out["cycle_lengths"] = sorted(gr.cycle_spectrum(g).lengths)
        return out

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "n": self.n,
            "q": self.q,
            "human": self.human,
            "engine": {"strategy": self.engine_name,
                       **describe_strategy(self.engine)},
            "status": self.status,
            "round_index": self.state.round_index,
            "free_count": self.state.free_count,
            "offer_size": self.state.q + 1,
            "pending_offer": (None if self.pending is None
                              else [self.encode(e) for e in self.pending]),
            "events": len(self.events),
            "forfeit": self.forfeit,
        }

    def transcript(self) -> Transcript:
        human = {"name": "human", "params": {"plays": self.human}}
        engine = describe_strategy(self.engine)
        status = {"active": "stopped"}.get(self.status, self.status)
        return Transcript(
            board=self.state.board, q=self.q,
            waiter=engine if self.human == "client" else human,
            client=human if self.human == "client" else engine,
            rounds=list(self.state.history), status=status,
            forfeit=self.forfeit)


def _parse_edge(board: Board, obj, n: int) -> int:
    if (not isinstance(obj, (list, tuple)) or len(obj) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool)
                       for x in obj)):
        raise ApiError("bad-edge", f"edge must be a [u, v] pair, got {obj!r}")
    u, v = obj
    if not (0 <= u < n and 0 <= v < n) or u == v:
        raise ApiError("bad-edge", f"edge {obj} is not an edge of K_{n}")
    return board.edge_id(u, v)


def create_app(persist_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="waiterclient sessions",
                  default_response_class=CanonicalJSONResponse)
    app.state.sessions = {}
    app.state.persist_dir = Path(persist_dir) if persist_dir else None
    if app.state.persist_dir is not None:
        app.state.persist_dir.mkdir(parents=True, exist_ok=True)

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return CanonicalJSONResponse(
            {"error": exc.code, "detail": exc.detail}, status_code=exc.status)

    @app.exception_handler(OfferSizeError)
    async def _offer_size(_req: Request, exc: OfferSizeError):
        return CanonicalJSONResponse(
            {"error": "offer-size", "detail": str(exc)}, status_code=400)

    @app.exception_handler(ElementNotFreeError)
    async def _not_free(_req: Request, exc: ElementNotFreeError):
        return CanonicalJSONResponse(
            {"error": "element-not-free", "detail": str(exc)}, status_code=400)

    @app.exception_handler(ChoiceNotOfferedError)
    async def _not_offered(_req: Request, exc: ChoiceNotOfferedError):
        return CanonicalJSONResponse(
            {"error": "choice-not-in-offer", "detail": str(exc)},
            status_code=400)

    @app.exception_handler(ParameterError)
    async def _bad_params(_req: Request, exc: ParameterError):
        return CanonicalJSONResponse(
            {"error": "bad-parameters", "detail": str(exc)}, status_code=400)

    @app.exception_handler(GameError)
    async def _game_error(_req: Request, exc: GameError):
        return CanonicalJSONResponse(
            {"error": "game-error", "detail": str(exc)}, status_code=400)

    @app.exception_handler(RequestValidationError)
    async def _bad_request(_req: Request, exc: RequestValidationError):
        return CanonicalJSONResponse(
            {"error": "bad-request", "detail": str(exc)}, status_code=422)

    def session_of(sid: str) -> Session:
        try:
            return app.state.sessions[sid]
        except KeyError:
            raise ApiError("unknown-session", f"no session {sid!r}", 404)

    @app.post("/sessions")
    def create(payload: dict = Body()):
        n = payload.get("n")
        q = payload.get("q")
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ApiError("bad-parameters", "n must be an integer >= 2")
        if not isinstance(q, int) or isinstance(q, bool) or q < 1:
            raise ApiError("bad-parameters", "q must be an integer >= 1")
        human = payload.get("human", "client")
        if human not in ("client", "waiter"):
            raise ApiError("bad-parameters",
                           f"human must be client or waiter, got {human!r}")
        seed = payload.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ApiError("bad-parameters", "seed must be an integer")
        if human == "client":
            name = payload.get("waiter", "auto")
            if name == "auto":
                name, engine = _auto_waiter(n, q)
            elif name in WAITER_NAMES:
                engine = make_waiter(name, n=n, q=q, seed=seed)
            else:
                raise ApiError("unknown-strategy",
                               f"unknown waiter strategy {name!r}")
        else:
            name = payload.get("client", "lex")
            if name not in CLIENT_NAMES:
                raise ApiError("unknown-strategy",
                               f"unknown client strategy {name!r}")
            engine = make_client(name, n=n, q=q, seed=seed)
        sid = uuid.uuid4().hex[:12]
        persist = (app.state.persist_dir / f"{sid}.events"
                   if app.state.persist_dir is not None else None)
        session = Session(sid, n, q, human, name, engine, persist)
        engine.begin(session.state)
        session.emit("created", n=n, q=q, human=human, engine=name)
        if human == "client":
            session.next_engine_offer()
        app.state.sessions[sid] = session
        return session.snapshot()

    @app.get("/sessions")
    def index():
        return {"sessions": [s.snapshot()
                             for s in app.state.sessions.values()]}

    @app.get("/sessions/{sid}")
    def show(sid: str):
        session = session_of(sid)
        with session.lock:
            return session.snapshot()

    @app.post("/sessions/{sid}/choice")
    def choice(sid: str, payload: dict = Body()):
        session = session_of(sid)
        with session.lock:
            if session.human != "client":
                raise ApiError("wrong-turn",
                               "the engine plays Client in this session", 409)
            if session.status != "active":
                raise ApiError("session-over",
                               f"session is {session.status}", 409)
            if session.pending is None:
                raise ApiError("wrong-turn", "no offer is pending", 409)
            eid = _parse_edge(session.state.board, payload.get("edge"),
                              session.n)
            if eid not in session.pending:
                raise ApiError("choice-not-in-offer",
                               f"edge {payload['edge']} is not in the offer")
            offer = session.pending
            session.pending = None
            session.state.apply_round_inplace(offer, eid)
            session.engine.observe(session.state, offer, eid)
            session.emit("round", round=session.state.round_index - 1,
                         offer=[session.encode(e) for e in offer],
                         choice=session.encode(eid))
            session.next_engine_offer()
            return session.snapshot()

    @app.post("/sessions/{sid}/offer")
    def offer(sid: str, payload: dict = Body()):
        session = session_of(sid)
        with session.lock:
            if session.human != "waiter":
                raise ApiError("wrong-turn",
                               "the engine plays Waiter in this session", 409)
            if session.status != "active":
                raise ApiError("session-over",
                               f"session is {session.status}", 409)
            edges = payload.get("edges")
            if not isinstance(edges, list):
                raise ApiError("bad-edge", "edges must be a list of pairs")
            ids = [_parse_edge(session.state.board, e, session.n)
                   for e in edges]
            # validate before the machine client sees the offer, so illegal
            # input cannot disturb strategy state
            want = session.state.offer_size()
            if len(ids) != want or len(set(ids)) != len(ids):
                raise OfferSizeError(
                    f"offer has {len(ids)} distinct elements, expected {want}")
            if not session.state.own.all_free(np.asarray(ids, dtype=np.int64)):
                raise ElementNotFreeError("offer contains a non-free element")
            try:
                pick = session.engine.choose(session.state, list(ids))
            except ForfeitError as f:
                session.status = "forfeit"
                session.forfeit = {"side": f.side,
                                   "round": session.state.round_index,
                                   "stage": f.stage, "reason": f.reason}
                session.emit("forfeit", **session.forfeit)
                return session.snapshot()
            session.state.apply_round_inplace(ids, pick)
            session.engine.observe(session.state, ids, pick)
            session.emit("round", round=session.state.round_index - 1,
                         offer=[session.encode(e) for e in sorted(ids)],
                         choice=session.encode(pick))
            if session.state.terminal:
                session._finish()
            return session.snapshot()

    @app.get("/sessions/{sid}/events")
    def events(sid: str, since: int = 0, wait: float = 0.0,
               stream: bool = False):
        session = session_of(sid)
        if since < 0:
            raise ApiError("bad-parameters", "since must be >= 0")
        if stream:
            def lines():
                at = since
                while True:
                    with session.cond:
                        session.cond.wait_for(
                            lambda: len(session.events) > at
                            or session.status != "active",
                            timeout=LONG_POLL_CAP)
                        chunk = session.events[at:]
                        done = session.status != "active"
                    for event in chunk:
                        yield canonical_json(event) + "\n"
                    at += len(chunk)
                    if done and at >= len(session.events):
                        return
            return StreamingResponse(lines(),
                                     media_type="application/x-ndjson")
        wait = max(0.0, min(float(wait), LONG_POLL_CAP))
        with session.cond:
            if wait:
                session.cond.wait_for(lambda: len(session.events) > since,
                                      timeout=wait)
            chunk = session.events[since:]
        return {"events": chunk, "next": since + len(chunk),
                "status": session.status}

    @app.get("/sessions/{sid}/transcript")
    def transcript(sid: str):
        session = session_of(sid)
        with session.lock:
            text = session.transcript().dumps()
        return Response(content=text, media_type="application/json")

    @app.get("/sessions/{sid}/analysis")
    def analysis(sid: str):
        session = session_of(sid)
        with session.lock:
            out = {"status": session.status, "report": session.report()}
            core = getattr(session.engine, "core", None)
            checks = getattr(core, "stage_checks", None)
            if checks is not None:
                out["stage_checks"] = [
                    {"stage": s, "ok": ok, "detail": d}
                    for s, ok, d in checks()]
            return out

    return app
