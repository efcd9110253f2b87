/**
 * Thin fetch wrapper over the session server.  Every non-2xx response
 * carries a canonical {"error": code, "detail": text} body; that pair is
 * rethrown as ApiError so callers can show the server's reason verbatim.
 */

import { Edge } from "./protocol.js";
import { SessionEvent, SessionSnapshot } from "./viewState.js";

export class ApiError extends Error {
  code: string;
  detail: string;
  status: number;

  constructor(code: string, detail: string, status: number) {
    super(`${code}: ${detail}`);
    this.code = code;
    this.detail = detail;
    this.status = status;
  }
}

export type CreateSessionRequest = {
  n: number;
  q: number;
  human: "client" | "waiter";
  waiter?: string;
  client?: string;
  seed?: number;
};

export type EventsPage = {
  events: SessionEvent[];
  next: number;
  status: string;
};

export type AnalysisDoc = {
  status: string;
  report: Record<string, unknown> & { cycle_lengths?: number[] };
  stage_checks?: { stage: string; ok: boolean; detail: string }[];
};

async function decodeError(res: Response): Promise<never> {
  let code = "http-error";
  let detail = `${res.status} ${res.statusText}`;
  try {
    const body = (await res.json()) as { error?: string; detail?: unknown };
    if (typeof body.error === "string") {
      code = body.error;
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    }
  } catch {
    // non-JSON error body: keep the HTTP status text
  }
  throw new ApiError(code, detail, res.status);
}

export function createApi(baseUrl: string) {
  const root = baseUrl.replace(/\/+$/, "");

  async function request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(root + path, init);
    if (!res.ok) await decodeError(res);
    return (await res.json()) as T;
  }

  function post<T>(path: string, body: unknown): Promise<T> {
    return request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  return {
    createSession(req: CreateSessionRequest): Promise<SessionSnapshot> {
      return post("/sessions", req);
    },
    getSession(id: string): Promise<SessionSnapshot> {
      return request(`/sessions/${id}`);
    },
    listSessions(): Promise<{ sessions: SessionSnapshot[] }> {
      return request("/sessions");
    },
    postChoice(id: string, edge: Edge): Promise<SessionSnapshot> {
      return post(`/sessions/${id}/choice`, { edge });
    },
    postOffer(id: string, edges: Edge[]): Promise<SessionSnapshot> {
      return post(`/sessions/${id}/offer`, { edges });
    },
    getEvents(id: string, since: number, wait = 0): Promise<EventsPage> {
      const params = new URLSearchParams({ since: String(since) });
      if (wait > 0) params.set("wait", String(wait));
      return request(`/sessions/${id}/events?${params}`);
    },
    async getTranscript(id: string): Promise<string> {
      const res = await fetch(`${root}/sessions/${id}/transcript`);
      if (!res.ok) await decodeError(res);
      return res.text();
    },
    getAnalysis(id: string): Promise<AnalysisDoc> {
      return request(`/sessions/${id}/analysis`);
    },
    transcriptUrl(id: string): string {
      return `${root}/sessions/${id}/transcript`;
    },
    /** Raw POST for malformed-body tests and other off-protocol probes. */
    async rawPost(path: string, body: string): Promise<{ status: number; text: string }> {
      const res = await fetch(root + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body,
      });
      return { status: res.status, text: await res.text() };
    },
  };
}

export type ApiClient = ReturnType<typeof createApi>;
