"""Session HTTP API: protocol enforcement, events, transcripts, persistence."""

import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from waiterclient import transcripts
from waiterclient.service import create_app


@pytest.fixture()
def client():
    return TestClient(create_app())


def make_session(api, **over):
    payload = {"n": 12, "q": 2, "human": "client"}
    payload.update(over)
    r = api.post("/sessions", json=payload)
    assert r.status_code == 200, r.text
    return r.json()


def finish_as_client(api, snap, pick=0):
    sid = snap["id"]
    rounds = 0
    while snap["status"] == "active":
        edge = snap["pending_offer"][pick]
        r = api.post(f"/sessions/{sid}/choice", json={"edge": edge})
        assert r.status_code == 200, r.text
        snap = r.json()
        rounds += 1
        assert rounds <= 200
    return snap


def test_create_delivers_a_full_offer_to_a_human_client(client):
    snap = make_session(client)
    assert snap["human"] == "client"
    assert snap["status"] == "active"
    assert len(snap["pending_offer"]) == 3
    # n=12 fails the pancyclic and spectrum preflights, so the auto pick
    # falls back to the connectivity construction
    assert snap["engine"]["strategy"] == "connectivity"


def test_full_game_events_and_transcript_replay(client):
    snap = finish_as_client(client, make_session(client))
    assert snap["status"] == "complete"
    sid = snap["id"]

    ev = client.get(f"/sessions/{sid}/events").json()
    seqs = [e["seq"] for e in ev["events"]]
    assert seqs == list(range(len(seqs)))
    assert ev["events"][0]["type"] == "created"
    assert ev["events"][-1]["type"] == "end"
    assert ev["status"] == "complete"

    text = client.get(f"/sessions/{sid}/transcript").text
    state = transcripts.replay(text)
    assert state.terminal
    assert client.get(f"/sessions/{sid}/transcript").text == text

    analysis = client.get(f"/sessions/{sid}/analysis").json()
    assert analysis["report"] == ev["events"][-1]["report"]
    assert analysis["report"]["connected"]
    assert {c["stage"] for c in analysis["stage_checks"]}


def test_protocol_violations_return_stable_codes(client):
    snap = make_session(client)
    sid = snap["id"]

    def code(resp):
        return resp.status_code, resp.json()["error"]

    assert code(client.post(f"/sessions/{sid}/choice",
                            json={"edge": [0, 0]})) == (400, "bad-edge")
    assert code(client.post(f"/sessions/{sid}/choice",
                            json={"edge": "x"})) == (400, "bad-edge")
    outside = [[u, v] for u in range(12) for v in range(u + 1, 12)
               if [u, v] not in snap["pending_offer"]][0]
    assert code(client.post(f"/sessions/{sid}/choice",
                            json={"edge": outside})) == (
        400, "choice-not-in-offer")
    assert code(client.post(f"/sessions/{sid}/offer",
                            json={"edges": []})) == (409, "wrong-turn")
    assert code(client.get("/sessions/nope")) == (404, "unknown-session")
    assert code(client.post("/sessions", json={"n": 1, "q": 2})) == (
        400, "bad-parameters")
    assert code(client.post("/sessions", json={"n": 8, "q": 2,
                                               "waiter": "nope"})) == (
        400, "unknown-strategy")


def test_human_waiter_round_trip_and_offer_validation(client):
    snap = make_session(client, n=6, human="waiter",
                        client="greedy_max_degree")
    sid = snap["id"]
    assert snap["pending_offer"] is None

    r = client.post(f"/sessions/{sid}/offer", json={"edges": [[0, 1]]})
    assert (r.status_code, r.json()["error"]) == (400, "offer-size")
    r = client.post(f"/sessions/{sid}/offer",
                    json={"edges": [[0, 1], [0, 2], [0, 2]]})
    assert r.json()["error"] == "offer-size"

    snap = client.post(f"/sessions/{sid}/offer",
                       json={"edges": [[0, 1], [0, 2], [1, 2]]}).json()
    assert snap["round_index"] == 1

    r = client.post(f"/sessions/{sid}/offer",
                    json={"edges": [[0, 1], [3, 4], [3, 5]]})
    assert (r.status_code, r.json()["error"]) == (400, "element-not-free")

    for offer in ([[0, 3], [0, 4], [0, 5]], [[1, 3], [1, 4], [1, 5]],
                  [[2, 3], [2, 4], [2, 5]], [[3, 4], [3, 5], [4, 5]]):
        snap = client.post(f"/sessions/{sid}/offer",
                           json={"edges": offer}).json()
    assert snap["status"] == "complete"
    assert snap["round_index"] == 5
    r = client.post(f"/sessions/{sid}/offer",
                    json={"edges": [[0, 1], [0, 2], [1, 2]]})
    assert (r.status_code, r.json()["error"]) == (409, "session-over")

    ev = client.get(f"/sessions/{sid}/events").json()["events"]
    rounds = [e for e in ev if e["type"] == "round"]
    assert len(rounds) == 5
    for e in rounds:
        assert e["choice"] in e["offer"]


def test_events_long_poll_wakes_on_new_rounds(client):
    snap = make_session(client, n=8, q=3)
    sid = snap["id"]
    got = {}

    def poll():
        got["r"] = client.get(f"/sessions/{sid}/events",
                              params={"since": 2, "wait": 10}).json()

    t = threading.Thread(target=poll)
    t.start()
    time.sleep(0.2)
    client.post(f"/sessions/{sid}/choice",
                json={"edge": snap["pending_offer"][0]})
    t.join(timeout=10)
    assert not t.is_alive()
    types = [e["type"] for e in got["r"]["events"]]
    assert types == ["round", "offer"]
    assert got["r"]["next"] == 4


def test_event_stream_closes_after_completion(client):
    snap = finish_as_client(client, make_session(client, n=8, q=3))
    with client.stream("GET", f"/sessions/{snap['id']}/events",
                       params={"stream": "true"}) as resp:
        lines = [json.loads(line) for line in resp.iter_lines() if line]
    assert [e["seq"] for e in lines] == list(range(len(lines)))
    assert lines[-1]["type"] == "end"


def test_event_log_persists_as_json_lines(tmp_path):
    client = TestClient(create_app(persist_dir=str(tmp_path)))
    snap = finish_as_client(client, make_session(client, n=8, q=3))
    ev = client.get(f"/sessions/{snap['id']}/events").json()["events"]
    lines = (tmp_path / f"{snap['id']}.events").read_text().splitlines()
    assert [json.loads(line) for line in lines] == ev


def test_malformed_input_cannot_corrupt_a_session(client):
    snap = make_session(client, n=8, q=3)
    sid = snap["id"]
    junk = [{}, {"edge": None}, {"edge": [0]}, {"edge": [0, 1, 2]},
            {"edge": [True, False]}, {"edge": [0, 99]}, {"edge": [-1, 3]},
            {"edge": ["0", "1"]}, {"other": 1}, {"edge": {"u": 0, "v": 1}}]
    for payload in junk:
        r = client.post(f"/sessions/{sid}/choice", json=payload)
        assert r.status_code in (400, 422), payload
    r = client.post(f"/sessions/{sid}/choice",
                    content=b"not json at all",
                    headers={"content-type": "application/json"})
    assert r.status_code == 422
    # the session is still healthy and playable to the end
    snap = client.get(f"/sessions/{sid}").json()
    assert snap["status"] == "active" and snap["round_index"] == 0
    snap = finish_as_client(client, snap)
    assert snap["status"] == "complete"
    state = transcripts.replay(
        client.get(f"/sessions/{sid}/transcript").text)
    assert state.terminal
