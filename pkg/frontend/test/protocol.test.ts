import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import {
  Edge,
  MoveContext,
  edgeKey,
  freshOwnership,
  validateChoice,
  validateOffer,
} from "../src/protocol.js";

type Vector = {
  name: string;
  session: string;
  phase: string;
  endpoint: "choice" | "offer" | "create";
  body?: Record<string, unknown>;
  expect: string;
  local: boolean;
};

const vectors = JSON.parse(
  readFileSync(new URL("./vectors/protocol-vectors.json", import.meta.url), "utf8"),
) as { cases: Vector[] };

const FIRST_CLIENT_OFFER: Edge[] = [[0, 1], [0, 2], [0, 3]];

/** The standard situations the vector file is written against. */
function contextFor(session: string, phase: string): MoveContext {
  const base: MoveContext = {
    n: 12,
    q: 2,
    role: session === "waiter" ? "waiter" : "client",
    status: "active",
    pendingOffer: session === "client" ? FIRST_CLIENT_OFFER : null,
    ownership: freshOwnership(12),
  };
  if (phase === "terminal") {
    base.status = "complete";
    base.pendingOffer = null;
  }
  if (phase === "no-pending") {
    base.pendingOffer = null;
  }
  if (phase === "after-round") {
    // round 0 of the waiter fixture: offer [[0,1],[2,3],[4,5]], lex client kept [0,1]
    base.ownership[edgeKey(0, 1)] = "client";
    base.ownership[edgeKey(2, 3)] = "waiter";
    base.ownership[edgeKey(4, 5)] = "waiter";
  }
  return base;
}

describe("local validators against the shared vector file", () => {
  const local = vectors.cases.filter((c) => c.local);

  it("covers both endpoints and the ok path", () => {
    expect(local.some((c) => c.expect === "ok")).toBe(true);
    expect(local.some((c) => c.endpoint === "offer")).toBe(true);
    expect(local.length).toBeGreaterThanOrEqual(15);
  });

  for (const vec of local) {
    it(vec.name, () => {
      const ctx = contextFor(vec.session, vec.phase);
      const result =
        vec.endpoint === "choice"
          ? validateChoice(ctx, vec.body?.edge)
          : validateOffer(ctx, vec.body?.edges);
      if (vec.expect === "ok") {
        expect(result).toBeNull();
      } else {
        expect(result?.code).toBe(vec.expect);
      }
    });
  }
});

describe("edge bookkeeping", () => {
  it("normalizes pair order in keys", () => {
    expect(edgeKey(7, 2)).toBe("2-7");
    expect(edgeKey(2, 7)).toBe("2-7");
  });

  it("builds the complete free board", () => {
    const own = freshOwnership(5);
    expect(Object.keys(own)).toHaveLength(10);
    expect(Object.values(own).every((o) => o === "free")).toBe(true);
  });
});
