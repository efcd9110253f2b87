/**
 * Client-side copy of the session server's protocol rules.
 *
 * The server is the authority; this module exists so the UI can reject a
 * bad submission before the round trip and explain it with the same error
 * code the server would use.  Checks run in the server's order, which is
 * what the shared vector file in test/vectors pins down.
 */

export type Edge = [number, number];
export type Ownership = "free" | "waiter" | "client";
export type Role = "client" | "waiter";

export type ProtocolError = { code: string; detail: string };

export function edgeKey(u: number, v: number): string {
  return u < v ? `${u}-${v}` : `${v}-${u}`;
}

export function keyToEdge(key: string): Edge {
  const [u, v] = key.split("-").map(Number);
  return [u as number, v as number];
}

function isVertex(x: unknown): x is number {
  return typeof x === "number" && Number.isInteger(x);
}

/** Accepts any [u, v] order, returns the edge sorted, or a bad-edge error. */
export function parseEdge(n: number, value: unknown): Edge | ProtocolError {
  if (
    !Array.isArray(value) ||
    value.length !== 2 ||
    !isVertex(value[0]) ||
    !isVertex(value[1])
  ) {
    return { code: "bad-edge", detail: `edge must be a [u, v] pair, got ${JSON.stringify(value)}` };
  }
  const [a, b] = value as [number, number];
  if (a < 0 || b < 0 || a >= n || b >= n || a === b) {
    return { code: "bad-edge", detail: `edge [${a},${b}] is not an edge of K_${n}` };
  }
  return a < b ? [a, b] : [b, a];
}

function isError(x: Edge | ProtocolError): x is ProtocolError {
  return !Array.isArray(x);
}

export type MoveContext = {
  n: number;
  q: number;
  role: Role;
  status: string;
  pendingOffer: Edge[] | null;
  ownership: Record<string, Ownership>;
};

/** Would the server accept this choice body?  Null means yes. */
export function validateChoice(ctx: MoveContext, edgeValue: unknown): ProtocolError | null {
  if (ctx.role !== "client") {
    return { code: "wrong-turn", detail: "the engine plays Client in this session" };
  }
  if (ctx.status !== "active") {
    return { code: "session-over", detail: `session is ${ctx.status}` };
  }
  if (ctx.pendingOffer === null) {
    return { code: "wrong-turn", detail: "no offer is pending" };
  }
  const edge = parseEdge(ctx.n, edgeValue);
  if (isError(edge)) return edge;
  const offered = ctx.pendingOffer.some(([u, v]) => u === edge[0] && v === edge[1]);
  if (!offered) {
    return { code: "choice-not-in-offer", detail: `edge [${edge[0]},${edge[1]}] is not in the offer` };
  }
  return null;
}

/** Would the server accept this offer body?  Null means yes. */
export function validateOffer(ctx: MoveContext, edgesValue: unknown): ProtocolError | null {
  if (ctx.role !== "waiter") {
    return { code: "wrong-turn", detail: "the engine plays Waiter in this session" };
  }
  if (ctx.status !== "active") {
    return { code: "session-over", detail: `session is ${ctx.status}` };
  }
  if (!Array.isArray(edgesValue)) {
    return { code: "bad-edge", detail: "edges must be a list of pairs" };
  }
  const edges: Edge[] = [];
  for (const item of edgesValue) {
    const edge = parseEdge(ctx.n, item);
    if (isError(edge)) return edge;
    edges.push(edge);
  }
  const want = ctx.q + 1;
  const distinct = new Set(edges.map(([u, v]) => edgeKey(u, v)));
  if (edges.length !== want || distinct.size !== edges.length) {
    return {
      code: "offer-size",
      detail: `offer has ${edges.length} distinct elements, expected ${want}`,
    };
  }
  for (const [u, v] of edges) {
    if (ctx.ownership[edgeKey(u, v)] !== "free") {
      return { code: "element-not-free", detail: "offer contains a non-free element" };
    }
  }
  return null;
}

/** Every edge of K_n in edge-id order, the order the server uses. */
export function allEdges(n: number): Edge[] {
  const out: Edge[] = [];
  for (let v = 1; v < n; v++) {
    for (let u = 0; u < v; u++) out.push([u, v]);
  }
  return out;
}

export function freshOwnership(n: number): Record<string, Ownership> {
  const own: Record<string, Ownership> = {};
  for (const [u, v] of allEdges(n)) own[edgeKey(u, v)] = "free";
  return own;
}
