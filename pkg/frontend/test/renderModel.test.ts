import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import {
  buildRenderModel,
  layoutVertices,
  renderPanelHtml,
  renderSvg,
} from "../src/renderModel.js";
import { parseTranscript, replayTranscript } from "../src/replay.js";
import {
  SessionEvent,
  SessionSnapshot,
  ViewState,
  applyEvents,
  initialView,
  toggleSelect,
} from "../src/viewState.js";

function fixture<T>(name: string): T {
  return JSON.parse(
    readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8"),
  ) as T;
}

const snapshot = fixture<SessionSnapshot>("session-n5-snapshot.json");
const events = fixture<SessionEvent[]>("session-n5-events.json");

const offered = applyEvents(initialView(snapshot), events.slice(0, 2));
const finished = applyEvents(initialView(snapshot), events);

describe("buildRenderModel", () => {
  it("marks exactly the offered edges clickable for the Client", () => {
    const model = buildRenderModel(offered);
    const clickable = model.edges.filter((e) => e.clickable);
    expect(clickable.map((e) => e.key).sort()).toEqual(["0-1", "0-2", "0-3"]);
    for (const e of clickable) expect(e.classes).toContain("offered");
  });

  it("classifies free, Waiter and Client edges distinctly", () => {
    const afterRound = applyEvents(initialView(snapshot), events.slice(0, 3));
    const model = buildRenderModel(afterRound);
    const byKey = new Map(model.edges.map((e) => [e.key, e.classes]));
    expect(byKey.get("0-1")).toContain("client");
    expect(byKey.get("0-2")).toContain("waiter");
    expect(byKey.get("3-4")).toContain("free");
    // one owner class each, never a mixture
    for (const classes of byKey.values()) {
      const owners = classes.filter((c) => ["free", "waiter", "client"].includes(c));
      expect(owners).toHaveLength(1);
    }
  });

  it("renders a terminal board with nothing clickable and the report visible", () => {
    const model = buildRenderModel(finished);
    expect(model.edges.some((e) => e.clickable)).toBe(false);
    expect(renderSvg(model)).toContain('data-status="complete"');
    const panel = renderPanelHtml(finished);
    expect(panel).toContain("game over after 3 rounds");
    expect(panel).toContain("client edges: 3");
  });

  it("locks every edge while a submission is in flight", () => {
    const busy = { ...offered, busy: true };
    const model = buildRenderModel(busy);
    expect(model.edges.some((e) => e.clickable)).toBe(false);
  });

  it("shows the selection", () => {
    const view = toggleSelect(offered, [0, 2]);
    const model = buildRenderModel(view);
    const selected = model.edges.filter((e) => e.classes.includes("selected"));
    expect(selected.map((e) => e.key)).toEqual(["0-2"]);
  });
});

describe("layout stability", () => {
  it("keeps vertex positions fixed for the whole game", () => {
    const before = buildRenderModel(offered).vertices;
    const after = buildRenderModel(finished).vertices;
    expect(after).toEqual(before);
  });

  it("places vertices on a circle in index order", () => {
    const vs = layoutVertices(8);
    expect(vs).toHaveLength(8);
    expect(vs[0]!.x).toBe(320);
    const unique = new Set(vs.map((v) => `${v.x},${v.y}`));
    expect(unique.size).toBe(8);
  });
});

describe("replay equals live play", () => {
  it("produces the same rendered board from events and from the transcript", () => {
    const text = readFileSync(
      new URL("./fixtures/session-n5-transcript.json", import.meta.url),
      "utf8",
    );
    const replayed = replayTranscript(parseTranscript(text));
    const endEvent = events[events.length - 1] as SessionEvent;
    const rebuilt: ViewState = {
      ...initialView(snapshot),
      ownership: replayed.ownership,
      status: "complete",
      roundIndex: replayed.roundsPlayed,
      report: endEvent.report ?? null,
      eventCursor: events.length,
    };
    const live = renderSvg(buildRenderModel(finished));
    const fromTranscript = renderSvg(buildRenderModel(rebuilt));
    expect(fromTranscript).toBe(live);
  });
});
