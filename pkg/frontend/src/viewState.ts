/**
 * Mirrored session state.
 *
 * The view is a pure fold over the server's event stream: it starts from
 * the session parameters, applies events in sequence order and refuses
 * gaps.  Nothing here invents ownership; an edge changes hands only when
 * a round event (or the terminal sweep implied by the end event) says so.
 * Reconnecting is therefore just "fetch the snapshot, replay events from
 * zero", and a replayed view is indistinguishable from a live one.
 */

import { componentSizes } from "./analysis.js";
import {
  Edge,
  Ownership,
  Role,
  edgeKey,
  freshOwnership,
} from "./protocol.js";

export type SessionSnapshot = {
  id: string;
  n: number;
  q: number;
  human: Role;
  engine: { strategy: string; name: string; params: Record<string, unknown> };
  status: string;
  round_index: number;
  free_count: number;
  offer_size: number;
  pending_offer: Edge[] | null;
  events: number;
  forfeit: ForfeitInfo | null;
};

export type ForfeitInfo = {
  side: string;
  round: number;
  stage: string;
  reason: string;
};

export type EndReport = {
  round_index: number;
  free_count: number;
  client_edge_count: number;
  client_edges: Edge[];
  components: number[];
  connected: boolean;
  min_degree: number;
  max_degree: number;
  cycle_lengths?: number[];
};

export type SessionEvent = {
  seq: number;
  type: "created" | "offer" | "round" | "end" | "forfeit";
  round?: number;
  offer?: Edge[];
  choice?: Edge;
  status?: string;
  report?: EndReport;
  side?: string;
  stage?: string;
  reason?: string;
};

export type PanelData = {
  components: number[];
  connected: boolean;
  clientEdgeCount: number;
  cycleLengths: number[] | null;
};

export type ViewState = {
  sessionId: string;
  n: number;
  q: number;
  role: Role;
  engineName: string;
  status: string;
  roundIndex: number;
  ownership: Record<string, Ownership>;
  pendingOffer: Edge[] | null;
  selection: Edge[];
  busy: boolean;
  lastError: { code: string; detail: string } | null;
  report: EndReport | null;
  forfeit: ForfeitInfo | null;
  panel: PanelData;
  eventCursor: number;
};

export class EventGapError extends Error {
  constructor(expected: number, got: number) {
    super(`event stream gap: expected seq ${expected}, got ${got}`);
  }
}

export function initialView(snapshot: SessionSnapshot): ViewState {
  return {
    sessionId: snapshot.id,
    n: snapshot.n,
    q: snapshot.q,
    role: snapshot.human,
    engineName: snapshot.engine.strategy,
    status: "active",
    roundIndex: 0,
    ownership: freshOwnership(snapshot.n),
    pendingOffer: null,
    selection: [],
    busy: false,
    lastError: null,
    report: null,
    forfeit: null,
    panel: { components: [], connected: false, clientEdgeCount: 0, cycleLengths: null },
    eventCursor: 0,
  };
}

function withOwner(
  own: Record<string, Ownership>,
  edges: Edge[],
  owner: Ownership,
): Record<string, Ownership> {
  const next = { ...own };
  for (const [u, v] of edges) next[edgeKey(u, v)] = owner;
  return next;
}

export function applyEvent(view: ViewState, event: SessionEvent): ViewState {
  if (event.seq !== view.eventCursor) {
    throw new EventGapError(view.eventCursor, event.seq);
  }
  const next: ViewState = { ...view, eventCursor: event.seq + 1 };
  switch (event.type) {
    case "created":
      return next;
    case "offer":
      next.pendingOffer = event.offer ?? [];
      next.roundIndex = event.round ?? view.roundIndex;
      next.busy = false;
      return next;
    case "round": {
      const offer = event.offer ?? [];
      const choice = event.choice;
      const kept = choice === undefined ? [] : [choice];
      const taken = offer.filter(
        ([u, v]) => choice === undefined || edgeKey(u, v) !== edgeKey(choice[0], choice[1]),
      );
      let own = withOwner(view.ownership, kept, "client");
      own = withOwner(own, taken, "waiter");
      next.ownership = own;
      next.roundIndex = (event.round ?? view.roundIndex) + 1;
      next.pendingOffer = null;
      next.busy = false;
      // edges that just left the board cannot stay selected
      next.selection = view.selection.filter(
        ([u, v]) => own[edgeKey(u, v)] === "free",
      );
      next.panel = refreshedPanel(next);
      return next;
    }
    case "end": {
      // the terminal sweep never appears as a round event: whatever is
      // still free goes to the Waiter when the game ends
      const leftovers = Object.keys(view.ownership).filter(
        (k) => view.ownership[k] === "free",
      );
      const own = { ...view.ownership };
      for (const k of leftovers) own[k] = "waiter";
      next.ownership = own;
      next.status = event.status ?? "complete";
      next.report = event.report ?? null;
      next.pendingOffer = null;
      next.selection = [];
      next.busy = false;
      next.panel = refreshedPanel(next);
      return next;
    }
    case "forfeit":
      next.status = "forfeit";
      next.forfeit = {
        side: event.side ?? "?",
        round: event.round ?? view.roundIndex,
        stage: event.stage ?? "?",
        reason: event.reason ?? "?",
      };
      next.pendingOffer = null;
      next.selection = [];
      next.busy = false;
      return next;
  }
}

function refreshedPanel(view: ViewState): PanelData {
  const edges = clientEdges(view);
  const components = componentSizes(view.n, edges);
  return {
    components,
    connected: components[0] === view.n,
    clientEdgeCount: edges.length,
    cycleLengths: view.panel.cycleLengths,
  };
}

export function applyEvents(view: ViewState, events: SessionEvent[]): ViewState {
  return events.reduce(applyEvent, view);
}

/** Merge the server's analysis report into the panel (cycle lengths). */
export function setAnalysis(
  view: ViewState,
  analysis: { report?: { cycle_lengths?: number[] } },
): ViewState {
  const lengths = analysis.report?.cycle_lengths ?? null;
  return { ...view, panel: { ...view.panel, cycleLengths: lengths } };
}

/**
 * Toggle an edge in the selection buffer.  Clients pick exactly one
 * offered edge; Waiters accumulate up to q+1 free edges.  Returns the
 * view unchanged when the click is not selectable.
 */
export function toggleSelect(view: ViewState, edge: Edge): ViewState {
  if (view.status !== "active" || view.busy) return view;
  const key = edgeKey(edge[0], edge[1]);
  const already = view.selection.some(([u, v]) => edgeKey(u, v) === key);
  if (already) {
    return {
      ...view,
      selection: view.selection.filter(([u, v]) => edgeKey(u, v) !== key),
    };
  }
  if (view.role === "client") {
    const offered = (view.pendingOffer ?? []).some(
      ([u, v]) => edgeKey(u, v) === key,
    );
    if (!offered) return view;
    return { ...view, selection: [edge] };
  }
  if (view.ownership[key] !== "free") return view;
  if (view.selection.length >= view.q + 1) return view;
  return { ...view, selection: [...view.selection, edge] };
}

/** Lock input while a submission is in flight; a confirming event unlocks. */
export function markBusy(view: ViewState): ViewState {
  return { ...view, busy: true, lastError: null };
}

/** A rejected submission: unlock and surface the server's reason verbatim. */
export function markRejected(
  view: ViewState,
  error: { code: string; detail: string },
): ViewState {
  return { ...view, busy: false, lastError: error };
}

export function clientEdges(view: ViewState): Edge[] {
  const out: Edge[] = [];
  for (const [key, owner] of Object.entries(view.ownership)) {
    if (owner === "client") {
      const [u, v] = key.split("-").map(Number);
      out.push([u as number, v as number]);
    }
  }
  out.sort((a, b) => (a[0] - b[0]) || (a[1] - b[1]));
  return out;
}
