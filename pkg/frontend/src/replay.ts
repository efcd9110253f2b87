/**
 * Transcript replay, independent of the server.
 *
 * A downloaded transcript is re-run here under full rule enforcement:
 * offers must be q+1 distinct free edges, the choice must come from the
 * offer, and only the final round may be a sweep (choice null, fewer
 * than q+1 edges, all of which go to the Waiter).  Re-serializing the
 * parsed document with the canonical writer must give back the exact
 * bytes that were downloaded; both facts together are the replay check.
 */

import { JsonValue, canonicalJson } from "./canonical.js";
import { Edge, Ownership, edgeKey, freshOwnership } from "./protocol.js";

export type TranscriptRound = [Edge[], Edge | null];

export type TranscriptDoc = {
  version: number;
  board: [string, number];
  q: number;
  waiter: { name: string; params: Record<string, JsonValue> };
  client: { name: string; params: Record<string, JsonValue> };
  rounds: TranscriptRound[];
  status: string;
  forfeit: Record<string, JsonValue> | null;
};

export class ReplayMismatch extends Error {}

export type ReplayResult = {
  n: number;
  ownership: Record<string, Ownership>;
  clientEdges: Edge[];
  waiterEdges: Edge[];
  roundsPlayed: number;
  sweepSize: number;
};

export function parseTranscript(text: string): TranscriptDoc {
  const doc = JSON.parse(text) as TranscriptDoc;
  if (doc.version !== 1) {
    throw new ReplayMismatch(`unsupported transcript version ${doc.version}`);
  }
  if (doc.board[0] !== "K_n") {
    throw new ReplayMismatch(`board ${doc.board[0]} is not a complete graph`);
  }
  return doc;
}

export function replayTranscript(doc: TranscriptDoc): ReplayResult {
  const n = doc.board[1];
  const q = doc.q;
  const ownership = freshOwnership(n);
  let free = (n * (n - 1)) / 2;
  let roundsPlayed = 0;
  let sweepSize = 0;
  doc.rounds.forEach(([offer, choice], index) => {
    const keys = offer.map(([u, v]) => edgeKey(u, v));
    if (new Set(keys).size !== keys.length) {
      throw new ReplayMismatch(`round ${index}: offer repeats an edge`);
    }
    for (const k of keys) {
      if (ownership[k] !== "free") {
        throw new ReplayMismatch(`round ${index}: edge ${k} is not free`);
      }
    }
    if (choice === null) {
      // terminal sweep: everything left on the board, Waiter takes it
      if (index !== doc.rounds.length - 1) {
        throw new ReplayMismatch(`round ${index}: sweep before the final round`);
      }
      if (offer.length >= q + 1 || offer.length !== free) {
        throw new ReplayMismatch(
          `round ${index}: sweep of ${offer.length} edges with ${free} free`,
        );
      }
      for (const k of keys) ownership[k] = "waiter";
      sweepSize = offer.length;
      free = 0;
      return;
    }
    if (offer.length !== q + 1) {
      throw new ReplayMismatch(
        `round ${index}: offer of ${offer.length} edges, expected ${q + 1}`,
      );
    }
    const chosen = edgeKey(choice[0], choice[1]);
    if (!keys.includes(chosen)) {
      throw new ReplayMismatch(`round ${index}: choice ${chosen} not offered`);
    }
    for (const k of keys) ownership[k] = k === chosen ? "client" : "waiter";
    free -= offer.length;
    roundsPlayed += 1;
  });
  if (doc.status === "complete" && free !== 0) {
    throw new ReplayMismatch(`status complete but ${free} edges still free`);
  }
  const clientEdges: Edge[] = [];
  const waiterEdges: Edge[] = [];
  for (const [key, owner] of Object.entries(ownership)) {
    if (owner === "free") continue;
    const [u, v] = key.split("-").map(Number) as [number, number];
    (owner === "client" ? clientEdges : waiterEdges).push([u, v]);
  }
  const byPair = (a: Edge, b: Edge) => (a[0] - b[0]) || (a[1] - b[1]);
  clientEdges.sort(byPair);
  waiterEdges.sort(byPair);
  return { n, ownership, clientEdges, waiterEdges, roundsPlayed, sweepSize };
}

/** Byte-identity check: parse, replay, re-serialize, compare. */
export function roundtripsExactly(text: string): boolean {
  const doc = parseTranscript(text);
  replayTranscript(doc);
  return canonicalJson(doc as unknown as JsonValue) === text;
}
