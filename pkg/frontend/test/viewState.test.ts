import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { edgeKey } from "../src/protocol.js";
import { parseTranscript, replayTranscript } from "../src/replay.js";
import {
  EventGapError,
  SessionEvent,
  SessionSnapshot,
  ViewState,
  applyEvent,
  applyEvents,
  clientEdges,
  initialView,
  markBusy,
  markRejected,
  setAnalysis,
  toggleSelect,
} from "../src/viewState.js";

function fixture<T>(name: string): T {
  return JSON.parse(
    readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8"),
  ) as T;
}

const snapshot = fixture<SessionSnapshot>("session-n5-snapshot.json");
const events = fixture<SessionEvent[]>("session-n5-events.json");
const transcriptText = readFileSync(
  new URL("./fixtures/session-n5-transcript.json", import.meta.url),
  "utf8",
);

describe("event folding", () => {
  it("replays the recorded session to the transcript's final ownership", () => {
    const view = applyEvents(initialView(snapshot), events);
    expect(view.status).toBe("complete");
    expect(view.roundIndex).toBe(3);
    expect(view.pendingOffer).toBeNull();

    const replayed = replayTranscript(parseTranscript(transcriptText));
    expect(view.ownership).toEqual(replayed.ownership);
    expect(clientEdges(view)).toEqual(replayed.clientEdges);
    // nothing stays free once the end event lands: the sweep is implied
    expect(Object.values(view.ownership)).not.toContain("free");
  });

  it("keeps the panel in step with the client graph", () => {
    let view = initialView(snapshot);
    for (const ev of events) {
      view = applyEvent(view, ev);
      const size = view.panel.components.reduce((a, b) => a + b, 0);
      expect(size === 0 || size === view.n).toBe(true);
    }
    expect(view.panel.clientEdgeCount).toBe(3);
    expect(view.panel.components[0]).toBe(4);
  });

  it("refuses gaps in the sequence", () => {
    const view = applyEvents(initialView(snapshot), events.slice(0, 2));
    expect(() => applyEvent(view, events[3] as SessionEvent)).toThrow(EventGapError);
  });

  it("never invents ownership outside events", () => {
    let view = initialView(snapshot);
    expect(Object.values(view.ownership).every((o) => o === "free")).toBe(true);
    view = applyEvent(view, events[0] as SessionEvent); // created
    view = applyEvent(view, events[1] as SessionEvent); // offer
    expect(Object.values(view.ownership).every((o) => o === "free")).toBe(true);
    view = applyEvent(view, events[2] as SessionEvent); // round
    const owned = Object.values(view.ownership).filter((o) => o !== "free");
    expect(owned).toHaveLength(3);
  });

  it("clears the busy lock only when the confirming event arrives", () => {
    let view = applyEvents(initialView(snapshot), events.slice(0, 2));
    view = markBusy(view);
    expect(view.busy).toBe(true);
    view = applyEvent(view, events[2] as SessionEvent);
    expect(view.busy).toBe(false);
  });

  it("surfaces a rejection verbatim and unlocks", () => {
    let view = applyEvents(initialView(snapshot), events.slice(0, 2));
    view = markBusy(view);
    view = markRejected(view, { code: "choice-not-in-offer", detail: "edge [2,4] is not in the offer" });
    expect(view.busy).toBe(false);
    expect(view.lastError).toEqual({
      code: "choice-not-in-offer",
      detail: "edge [2,4] is not in the offer",
    });
  });
});

describe("selection buffer", () => {
  const offered = applyEvents(initialView(snapshot), events.slice(0, 2));

  it("lets the Client hold exactly one offered edge", () => {
    let view = toggleSelect(offered, [0, 1]);
    expect(view.selection).toEqual([[0, 1]]);
    view = toggleSelect(view, [0, 2]);
    expect(view.selection).toEqual([[0, 2]]);
    view = toggleSelect(view, [0, 2]);
    expect(view.selection).toEqual([]);
  });

  it("ignores clicks on unoffered edges for the Client", () => {
    const view = toggleSelect(offered, [3, 4]);
    expect(view.selection).toEqual([]);
  });

  it("caps the Waiter's buffer at q+1 free edges", () => {
    let view: ViewState = { ...offered, role: "waiter", pendingOffer: null };
    view = toggleSelect(view, [0, 1]);
    view = toggleSelect(view, [0, 2]);
    view = toggleSelect(view, [0, 3]);
    expect(view.selection).toHaveLength(3);
    view = toggleSelect(view, [0, 4]);
    expect(view.selection).toHaveLength(3);
  });

  it("drops selected edges that a round takes off the board", () => {
    let view = toggleSelect(offered, [0, 1]);
    view = applyEvent(view, events[2] as SessionEvent);
    expect(view.selection).toEqual([]);
    expect(view.ownership[edgeKey(0, 1)]).toBe("client");
  });

  it("ignores clicks while a submission is in flight", () => {
    const view = toggleSelect(markBusy(offered), [0, 1]);
    expect(view.selection).toEqual([]);
  });
});

describe("analysis panel", () => {
  it("adopts the server's cycle lengths without touching the rest", () => {
    const view = applyEvents(initialView(snapshot), events);
    const withCycles = setAnalysis(view, { report: { cycle_lengths: [3] } });
    expect(withCycles.panel.cycleLengths).toEqual([3]);
    expect(withCycles.panel.components).toEqual(view.panel.components);
  });
});
