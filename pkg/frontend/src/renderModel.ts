/**
 * Pure presentation model for the board.
 *
 * Vertices sit on a fixed circle (vertex 0 at twelve o'clock, then
 * clockwise), so an edge keeps its position for the whole game and across
 * replays.  Every edge carries a class list that fully determines its
 * appearance and clickability; tests compare those class lists, and the
 * SVG renderer below is a direct transliteration of the model.
 */

import { Edge, allEdges, edgeKey } from "./protocol.js";
import { ViewState } from "./viewState.js";

export const BOARD_SIZE = 640;
const MARGIN = 36;

// Okabe-Ito palette: distinguishable under the common color-vision
// deficiencies, which matters when ownership is the whole story
export const PALETTE = {
  free: "#bbbbbb",
  waiter: "#e69f00",
  client: "#0072b2",
  offered: "#d55e00",
  selected: "#009e73",
  vertex: "#222222",
};

export type VertexView = {
  id: number;
  x: number;
  y: number;
};

export type EdgeView = {
  key: string;
  u: number;
  v: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  classes: string[];
  clickable: boolean;
};

export type RenderModel = {
  n: number;
  status: string;
  roundIndex: number;
  vertices: VertexView[];
  edges: EdgeView[];
  offerSize: number;
  selectionCount: number;
};

export function layoutVertices(n: number): VertexView[] {
  const cx = BOARD_SIZE / 2;
  const cy = BOARD_SIZE / 2;
  const r = BOARD_SIZE / 2 - MARGIN;
  return Array.from({ length: n }, (_, i) => {
    const angle = -Math.PI / 2 + (2 * Math.PI * i) / n;
    return {
      id: i,
      x: Math.round(cx + r * Math.cos(angle)),
      y: Math.round(cy + r * Math.sin(angle)),
    };
  });
}

function edgeExtras(view: ViewState): { offered: Set<string>; selected: Set<string> } {
  const offered = new Set(
    (view.pendingOffer ?? []).map(([u, v]) => edgeKey(u, v)),
  );
  const selected = new Set(view.selection.map(([u, v]) => edgeKey(u, v)));
  return { offered, selected };
}

function isClickable(view: ViewState, key: string, offered: boolean): boolean {
  if (view.status !== "active" || view.busy) return false;
  if (view.role === "client") return offered;
  return view.ownership[key] === "free";
}

export function buildRenderModel(view: ViewState): RenderModel {
  const vertices = layoutVertices(view.n);
  const { offered, selected } = edgeExtras(view);
  const edges = allEdges(view.n).map(([u, v]: Edge): EdgeView => {
    const key = edgeKey(u, v);
    const owner = view.ownership[key] ?? "free";
    const classes = ["edge", owner];
    if (offered.has(key)) classes.push("offered");
    if (selected.has(key)) classes.push("selected");
    const clickable = isClickable(view, key, offered.has(key));
    if (clickable) classes.push("clickable");
    const a = vertices[u]!;
    const b = vertices[v]!;
    return { key, u, v, x1: a.x, y1: a.y, x2: b.x, y2: b.y, classes, clickable };
  });
  return {
    n: view.n,
    status: view.status,
    roundIndex: view.roundIndex,
    vertices,
    edges,
    offerSize: view.q + 1,
    selectionCount: view.selection.length,
  };
}

const STYLE = `
  line.edge { stroke: ${PALETTE.free}; stroke-width: 1; }
  line.edge.waiter { stroke: ${PALETTE.waiter}; stroke-width: 2.5; }
  line.edge.client { stroke: ${PALETTE.client}; stroke-width: 3.5; }
  line.edge.offered { stroke: ${PALETTE.offered}; stroke-width: 4; stroke-dasharray: 7 3; }
  line.edge.selected { stroke: ${PALETTE.selected}; stroke-width: 5; }
  line.edge.clickable { cursor: pointer; }
  circle.vertex { fill: ${PALETTE.vertex}; }
  text.vlabel { font: 12px sans-serif; text-anchor: middle; }
`;

/**
 * Render the model to an SVG string.  Deterministic: same model, same
 * bytes, which is what the replay comparison tests lean on.
 */
export function renderSvg(model: RenderModel): string {
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${BOARD_SIZE} ${BOARD_SIZE}" ` +
      `width="${BOARD_SIZE}" height="${BOARD_SIZE}" data-status="${model.status}" ` +
      `data-round="${model.roundIndex}">`,
  );
  parts.push(`<style>${STYLE}</style>`);
  parts.push('<g class="edges">');
  for (const e of model.edges) {
    parts.push(
      `<line data-edge="${e.key}" class="${e.classes.join(" ")}" ` +
        `x1="${e.x1}" y1="${e.y1}" x2="${e.x2}" y2="${e.y2}"/>`,
    );
  }
  parts.push("</g>");
  parts.push('<g class="vertices">');
  for (const v of model.vertices) {
    parts.push(`<circle class="vertex" cx="${v.x}" cy="${v.y}" r="6"/>`);
    parts.push(`<text class="vlabel" x="${v.x}" y="${v.y - 10}">${v.id}</text>`);
  }
  parts.push("</g>");
  parts.push("</svg>");
  return parts.join("");
}

function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** The side panel: round status, component sizes, cycle lengths, report. */
export function renderPanelHtml(view: ViewState): string {
  const rows: string[] = [];
  rows.push(`<p class="status">round ${view.roundIndex}, ${escapeHtml(view.status)}</p>`);
  rows.push(
    `<p class="components">components: ${view.panel.components.join(", ") || "none yet"}` +
      `${view.panel.connected ? " (connected)" : ""}</p>`,
  );
  if (view.panel.cycleLengths !== null) {
    rows.push(
      `<p class="cycles">cycle lengths: ${view.panel.cycleLengths.join(", ") || "none"}</p>`,
    );
  }
  if (view.lastError !== null) {
    rows.push(
      `<p class="error">${escapeHtml(view.lastError.code)}: ` +
        `${escapeHtml(view.lastError.detail)}</p>`,
    );
  }
  if (view.forfeit !== null) {
    rows.push(
      `<p class="forfeit">forfeit by ${escapeHtml(view.forfeit.side)} in round ` +
        `${view.forfeit.round} (${escapeHtml(view.forfeit.stage)}): ` +
        `${escapeHtml(view.forfeit.reason)}</p>`,
    );
  }
  if (view.report !== null) {
    const r = view.report;
    rows.push('<div class="report">');
    rows.push(`<p>game over after ${r.round_index} rounds</p>`);
    rows.push(`<p>client edges: ${r.client_edge_count}</p>`);
    rows.push(`<p>components: ${r.components.join(", ")}</p>`);
    rows.push(`<p>connected: ${r.connected}</p>`);
    rows.push(`<p>degrees: min ${r.min_degree}, max ${r.max_degree}</p>`);
    if (r.cycle_lengths !== undefined) {
      rows.push(`<p>cycle lengths: ${r.cycle_lengths.join(", ") || "none"}</p>`);
    }
    rows.push("</div>");
  }
  return rows.join("\n");
}
