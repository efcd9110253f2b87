/**
 * Local graph summaries for the live panel: component sizes of the
 * Client's graph after every round, cheap enough to recompute from the
 * mirrored ownership at board sizes this UI targets (n <= 60).  Cycle
 * lengths come from the server's analysis endpoint, which knows when an
 * exact spectrum is affordable.
 */

import { Edge } from "./protocol.js";

/** Sizes of the connected components of (V, edges), descending. */
export function componentSizes(n: number, edges: Edge[]): number[] {
  const parent = Array.from({ length: n }, (_, i) => i);
  const find = (x: number): number => {
    let root = x;
    while (parent[root] !== root) root = parent[root] as number;
    while (parent[x] !== root) {
      const up = parent[x] as number;
      parent[x] = root;
      x = up;
    }
    return root;
  };
  for (const [u, v] of edges) {
    const ru = find(u);
    const rv = find(v);
    if (ru !== rv) parent[ru] = rv;
  }
  const size = new Map<number, number>();
  for (let i = 0; i < n; i++) {
    const r = find(i);
    size.set(r, (size.get(r) ?? 0) + 1);
  }
  return [...size.values()].sort((a, b) => b - a);
}

export function isConnected(n: number, edges: Edge[]): boolean {
  return componentSizes(n, edges)[0] === n;
}
