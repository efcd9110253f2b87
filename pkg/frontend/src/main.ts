/**
 * Browser wiring: one session at a time, rendered into #board / #panel.
 *
 * The loop is strictly confirm-by-event: clicking only edits the local
 * selection buffer, submitting locks the inputs, and the board changes
 * appearance only once the corresponding event arrives from the server.
 * Losing the connection is recoverable; the poll loop resumes from the
 * last seen sequence number, and a full reload rebuilds the same view by
 * replaying events from zero.
 */

import { ApiClient, ApiError, createApi } from "./api.js";
import { keyToEdge, validateChoice, validateOffer } from "./protocol.js";
import { buildRenderModel, renderPanelHtml, renderSvg } from "./renderModel.js";
import {
  SessionEvent,
  ViewState,
  applyEvents,
  initialView,
  markBusy,
  markRejected,
  setAnalysis,
  toggleSelect,
} from "./viewState.js";

type Ui = {
  api: ApiClient;
  view: ViewState;
  polling: boolean;
};

let ui: Ui | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

function redraw(): void {
  if (ui === null) return;
  const model = buildRenderModel(ui.view);
  el("board").innerHTML = renderSvg(model);
  el("panel").innerHTML = renderPanelHtml(ui.view);
  const submit = el<HTMLButtonElement>("submit");
  submit.disabled =
    ui.view.busy || ui.view.status !== "active" || ui.view.selection.length === 0;
  const download = el<HTMLAnchorElement>("download");
  download.href = ui.api.transcriptUrl(ui.view.sessionId);
  // selection goes out via delegation on the svg
  el("board").onclick = (ev) => {
    const target = ev.target as Element;
    const key = target.getAttribute("data-edge");
    if (key !== null && ui !== null) {
      ui.view = toggleSelect(ui.view, keyToEdge(key));
      redraw();
    }
  };
}

async function pollLoop(): Promise<void> {
  if (ui === null || ui.polling) return;
  ui.polling = true;
  while (ui !== null && ui.view.status === "active") {
    try {
      const page = await ui.api.getEvents(ui.view.sessionId, ui.view.eventCursor, 25);
      ui.view = applyEvents(ui.view, page.events as SessionEvent[]);
      if (page.events.length > 0) {
        try {
          ui.view = setAnalysis(ui.view, await ui.api.getAnalysis(ui.view.sessionId));
        } catch {
          // analysis is decorative; the game goes on without it
        }
        redraw();
      }
    } catch (err) {
      console.error("event poll failed, retrying", err);
      await new Promise((r) => setTimeout(r, 1000));
    }
  }
  if (ui !== null) {
    ui.polling = false;
    redraw();
  }
}

async function startSession(): Promise<void> {
  const base = el<HTMLInputElement>("server").value;
  const n = Number(el<HTMLInputElement>("n").value);
  const q = Number(el<HTMLInputElement>("q").value);
  const role = el<HTMLSelectElement>("role").value as "client" | "waiter";
  const api = createApi(base);
  try {
    const snapshot = await api.createSession({ n, q, human: role, seed: 0 });
    let view = initialView(snapshot);
    ui = { api, view, polling: false };
    void pollLoop();
    redraw();
  } catch (err) {
    if (err instanceof ApiError) {
      el("panel").textContent = `${err.code}: ${err.detail}`;
    } else {
      throw err;
    }
  }
}

async function submitMove(): Promise<void> {
  if (ui === null || ui.view.busy) return;
  const view = ui.view;
  const ctx = {
    n: view.n,
    q: view.q,
    role: view.role,
    status: view.status,
    pendingOffer: view.pendingOffer,
    ownership: view.ownership,
  };
  if (view.role === "client") {
    const edge = view.selection[0];
    if (edge === undefined) return;
    const local = validateChoice(ctx, edge);
    if (local !== null) {
      ui.view = markRejected(view, local);
      redraw();
      return;
    }
    ui.view = markBusy(view);
    redraw();
    try {
      await ui.api.postChoice(view.sessionId, edge);
    } catch (err) {
      if (err instanceof ApiError) {
        ui.view = markRejected(ui.view, { code: err.code, detail: err.detail });
        redraw();
      } else {
        throw err;
      }
    }
    return;
  }
  const local = validateOffer(ctx, view.selection);
  if (local !== null) {
    ui.view = markRejected(view, local);
    redraw();
    return;
  }
  ui.view = markBusy(view);
  redraw();
  try {
    await ui.api.postOffer(view.sessionId, view.selection);
  } catch (err) {
    if (err instanceof ApiError) {
      ui.view = markRejected(ui.view, { code: err.code, detail: err.detail });
      redraw();
    } else {
      throw err;
    }
  }
}

export function boot(): void {
  el<HTMLButtonElement>("start").onclick = () => void startSession();
  el<HTMLButtonElement>("submit").onclick = () => void submitMove();
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
