"""Static graph analysis: the predicates and certificates strategies rely on.

Everything here is a pure function of its inputs.  Exact algorithms carry
explicit budgets and raise BudgetExceededError beyond them; sampled modes
label themselves in their verdicts and never claim certainty.

Conventions: vertices are 0..n-1; the circumference of an acyclic graph is
reported as 0; a "path" is a vertex sequence and its length is its edge
count; N(S) is the external neighborhood (neighbors outside S).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial, e as _e

import numpy as np

from .engine import BudgetExceededError, GameState

EXACT_DP_BUDGET = 18      # subset dynamic programming (paths, cycles, boosters)
SUBSET_ENUM_CAP = 250_000  # max subsets an "exact" expander size-band may cost
PRUFER_BUDGET = 9          # labeled-tree enumeration k^(k-2)


class SimpleGraph:
    """Adjacency-set graph on labeled vertices, optionally bipartitioned.

    The bipartition (V1, V2), when set, marks the graph as a half-expander
    context; edges are then required to cross it.
    """

    __slots__ = ("n", "adj", "m", "bipartition")

    def __init__(self, n: int, bipartition: tuple | None = None):
        self.n = n
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.m = 0
        self.bipartition = None
        if bipartition is not None:
            v1, v2 = (frozenset(bipartition[0]), frozenset(bipartition[1]))
            if v1 & v2 or len(v1) + len(v2) != n:
                raise ValueError("bipartition must partition the vertex set")
            self.bipartition = (v1, v2)

    @staticmethod
    def from_edges(n: int, edges, bipartition=None) -> "SimpleGraph":
        g = SimpleGraph(n, bipartition)
        for u, v in edges:
            g.add_edge(int(u), int(v))
        return g

    @staticmethod
    def from_game(state: GameState) -> "SimpleGraph":
        if not state.board.is_graph:
            raise ValueError("state is not on a K_n board")
        g = SimpleGraph(state.board.n)
        for u, v in state.client_edge_pairs():
            g.add_edge(u, v)
        return g

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError(f"loop edge at {u}")
        if self.bipartition is not None:
            v1, _ = self.bipartition
            if (u in v1) == (v in v1):
                raise ValueError(f"edge ({u},{v}) does not cross the bipartition")
        if v not in self.adj[u]:
            self.adj[u].add(v)
            self.adj[v].add(u)
            self.m += 1

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def edges(self):
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def degree(self, u: int) -> int:
        return len(self.adj[u])

    def copy(self) -> "SimpleGraph":
        g = SimpleGraph(self.n)
        g.bipartition = self.bipartition
        g.adj = [set(a) for a in self.adj]
        g.m = self.m
        return g

    def __repr__(self):
        return f"SimpleGraph(n={self.n}, m={self.m})"


def save_graph(g: SimpleGraph, path) -> None:
    with open(path, "w") as fh:
        for u, v in sorted(g.edges()):
            fh.write(f"{u} {v}\n")


def load_graph(path, n: int | None = None) -> SimpleGraph:
    pairs = []
    top = -1
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            u, v = (int(x) for x in line.split())
            pairs.append((u, v))
            top = max(top, u, v)
    return SimpleGraph.from_edges(n if n is not None else top + 1, pairs)


# -- components and forests -------------------------------------------------

def component_profile(g: SimpleGraph) -> tuple[list[int], bool]:
    """Component orders, largest first, plus a connectivity flag."""
    seen = [False] * g.n
    sizes = []
    for s in range(g.n):
        if seen[s]:
            continue
        size = 0
        stack = [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            size += 1
            for v in g.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        sizes.append(size)
    sizes.sort(reverse=True)
    return sizes, len(sizes) == 1


def is_forest(g: SimpleGraph) -> bool:
    sizes, _ = component_profile(g)
    return g.m == g.n - len(sizes)


def girth(g: SimpleGraph) -> int | None:
    """Length of a shortest cycle, or None for a forest.

    BFS from every vertex; the first non-tree edge met at each root bounds a
    cycle through it, and the minimum over roots is exact.
    """
    best = None
    for root in range(g.n):
        dist = {root: 0}
        parent = {root: -1}
        frontier = [root]
        while frontier:
            nxt = []
            for u in frontier:
                for v in g.adj[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        parent[v] = u
                        nxt.append(v)
                    elif v != parent[u] and dist[v] >= dist[u]:
                        cand = dist[u] + dist[v] + 1
                        if best is None or cand < best:
                            best = cand
            if best is not None and frontier and 2 * dist[frontier[0]] >= best:
                break
            frontier = nxt
    return best


# -- vertex connectivity ----------------------------------------------------

@dataclass
class ConnectivityVerdict:
    holds: bool
    target: int
    cut: set | None
    mode: str
    detail: str = ""


def _split_flow_at_most(g: SimpleGraph, s: int, t: int, cap: int) -> tuple[int, set]:
    """Internally disjoint s-t paths, counted up to cap.

    Returns (count, separator): when count < cap the separator is a vertex
    cut of exactly that size between s and t, else it is empty.  Standard
    unit-capacity flow on the split digraph (v_in -> v_out per vertex).
    """
    n = g.n
    INF = cap + 1
    graph: list[list[list[int]]] = [[] for _ in range(2 * n)]  # [to, cap, rev]

    def arc(a: int, b: int, c: int) -> None:
        graph[a].append([b, c, len(graph[b])])
        graph[b].append([a, 0, len(graph[a]) - 1])

    for v in range(n):
        if v != s and v != t:
            arc(v, v + n, 1)
    for u, v in g.edges():
        arc(u + n, v, INF)
        arc(v + n, u, INF)
    source, sink = s + n, t
    flow = 0
    while flow < cap:
        parent: dict[int, tuple[int, int]] = {source: (-1, -1)}
        queue = deque([source])
        while queue and sink not in parent:
            a = queue.popleft()
            for i, (b, c, _r) in enumerate(graph[a]):
                if c > 0 and b not in parent:
                    parent[b] = (a, i)
                    queue.append(b)
        if sink not in parent:
            break
        b = sink
        while b != source:
            a, i = parent[b]
            graph[a][i][1] -= 1
            rev = graph[a][i][2]
            graph[b][rev][1] += 1
            b = a
        flow += 1
    if flow >= cap:
        return flow, set()
    reach = {source}
    queue = deque([source])
    while queue:
        a = queue.popleft()
        for b, c, _r in graph[a]:
            if c > 0 and b not in reach:
                reach.add(b)
                queue.append(b)
    cut = {v for v in range(n)
           if v != s and v != t and v in reach and v + n not in reach}
    return flow, cut


def vertex_connectivity_at_least(g: SimpleGraph, k: int, mode: str = "auto", *,
                                 samples: int = 2000,
                                 seed: int = 0) -> ConnectivityVerdict:
    """Is g k-vertex-connected?

    Exact mode runs a capped flow for every non-adjacent pair and returns a
    separating set as the witness when the answer is no.  Sampled mode
    removes random (k-1)-subsets and only ever refutes with certainty; its
    positive verdicts are labeled "sampled".  Auto picks exact while the
    pair count stays reasonable.
    """
    if k <= 0:
        return ConnectivityVerdict(True, k, None, "exact", "holds vacuously")
    if g.n <= k:
        return ConnectivityVerdict(
            False, k, None, "exact",
            f"{g.n} vertices cannot be {k}-connected")
    _, connected = component_profile(g)
    if not connected:
        return ConnectivityVerdict(False, k, set(), "exact",
                                   "graph is already disconnected")
    degs = [g.degree(v) for v in range(g.n)]
    v_min = min(range(g.n), key=degs.__getitem__)
    if degs[v_min] < k:
        return ConnectivityVerdict(
            False, k, set(g.adj[v_min]), "exact",
            f"vertex {v_min} has degree {degs[v_min]}")
    nonadj = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)
              if not g.has_edge(u, v)]
    if not nonadj:
        return ConnectivityVerdict(True, k, None, "exact",
                                   f"complete graph, connectivity {g.n - 1}")
    if mode == "exact" or (mode == "auto" and len(nonadj) * k * (g.n + g.m) <= 50_000_000):
        for u, v in nonadj:
            flow, cut = _split_flow_at_most(g, u, v, k)
            if flow < k:
                return ConnectivityVerdict(
                    False, k, cut, "exact",
                    f"{len(cut)} vertices separate {u} and {v}")
        return ConnectivityVerdict(True, k, None, "exact",
                                   f"all {len(nonadj)} non-adjacent pairs pass")
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        drop = set(int(x) for x in rng.choice(g.n, size=k - 1, replace=False))
        keep = [v for v in range(g.n) if v not in drop]
        seen = {keep[0]}
        stack = [keep[0]]
        while stack:
            a = stack.pop()
            for b in g.adj[a]:
                if b not in drop and b not in seen:
                    seen.add(b)
                    stack.append(b)
        if len(seen) != len(keep):
            return ConnectivityVerdict(False, k, drop, "exact",
                                       "sampled removal disconnects")
    return ConnectivityVerdict(True, k, None, "sampled",
                               f"{samples} random removals survived")


# -- exact subset dynamic programming --------------------------------------

def _adj_masks(g: SimpleGraph, vertices: list[int]) -> list[int]:
    index = {v: i for i, v in enumerate(vertices)}
    masks = [0] * len(vertices)
    for v in vertices:
        mask = 0
        for w in g.adj[v]:
            if w in index:
                mask |= 1 << index[w]
        masks[index[v]] = mask
    return masks


@dataclass
class CycleSpectrum:
    lengths: set
    circumference: int
    hamiltonian: bool
    pancyclic: bool
    mode: str


def cycle_spectrum(g: SimpleGraph, k_max: int | None = None, *,
                   exact_budget: int = EXACT_DP_BUDGET,
                   repetition_factor: float = 3.0,
                   seed: int = 0) -> CycleSpectrum:
    """Cycle lengths present in g.

    Exact mode (k_max is None) enumerates via anchored subset DP and needs
    n <= exact_budget.  Bounded mode finds lengths 3..k_max by color coding;
    it can miss cycles (each length is missed with probability < 5% at the
    default repetition factor) and labels itself "bounded".
    """
    if k_max is None:
        if g.n > exact_budget:
            raise BudgetExceededError(
                f"exact cycle spectrum needs n <= {exact_budget}, got {g.n}")
        lengths = _cycle_lengths_exact(g)
        mode = "exact"
    else:
        lengths = {k for k in range(3, min(k_max, g.n) + 1)
                   if _has_cycle_color_coding(g, k, repetition_factor, seed)}
        mode = "bounded"
    circ = max(lengths) if lengths else 0
    return CycleSpectrum(
        lengths=lengths,
        circumference=circ,
        hamiltonian=g.n in lengths,
        pancyclic=lengths >= set(range(3, g.n + 1)),
        mode=mode,
    )


def _cycle_lengths_exact(g: SimpleGraph) -> set:
    found: set[int] = set()
    want = g.n - 2  # distinct lengths possible: 3..n
    for anchor in range(g.n - 2):
        verts = list(range(anchor, g.n))
        masks = _adj_masks(g, verts)
        layer = {1: 1}  # subset -> bitmask of path endpoints, path from bit 0
        size = 1
        while layer:
            size += 1
            nxt: dict[int, int] = {}
            for subset, ends in layer.items():
                rest = ends
                while rest:
                    bit = rest & -rest
                    rest ^= bit
                    v = bit.bit_length() - 1
                    if size - 1 >= 3 and masks[v] & 1:
                        found.add(size - 1)
                    cand = masks[v] & ~subset
                    while cand:
                        b = cand & -cand
                        cand ^= b
                        key = subset | b
                        nxt[key] = nxt.get(key, 0) | b
            layer = nxt
        if len(found) == want:
            break
    return found


def _has_cycle_color_coding(g: SimpleGraph, k: int, repetition_factor: float,
                            seed: int) -> bool:
    if k < 3 or g.m < k or g.n < k:
        return False
    if k == 3:
        for u in range(g.n):
            for v in g.adj[u]:
                if v > u and g.adj[u] & g.adj[v]:
                    return True
        return False
    if (1 << k) * g.n > 50_000_000:
        raise BudgetExceededError(
            f"color-coding table for k={k}, n={g.n} exceeds the memory cap")
    # repetitions scale with 1/P[a fixed k-cycle is rainbow] = k^k / k!
    reps = min(2000, max(1, int(repetition_factor * k ** k / factorial(k))))
    rng = np.random.default_rng(seed)
    edges = np.array(sorted(g.edges()), dtype=np.int64)
    us, vs = edges[:, 0], edges[:, 1]
    full = (1 << k) - 1
    for _ in range(reps):
        color = rng.integers(0, k, g.n)
        cbit = (1 << color).astype(np.int64)
        # dp[S][v] = 1 + anchor of some rainbow path over colors S from a
        # color-0 anchor to v, or 0.  Remembering the anchor (one of possibly
        # several) lets the closing edge be checked exactly, so a reported
        # length is never spurious; collisions only cost recall.
        dp = np.zeros((1 << k, g.n), dtype=np.int32)
        anchors = np.flatnonzero(color == 0)
        dp[1, anchors] = anchors + 1
        for S in range(1, 1 << k, 2):
            row = dp[S]
            if not row.any():
                continue
            from_u = row[us]
            from_v = row[vs]
            grow_uv = (from_u > 0) & ((S & cbit[vs]) == 0)
            grow_vu = (from_v > 0) & ((S & cbit[us]) == 0)
            for sel, src, dst in ((grow_uv, from_u, vs), (grow_vu, from_v, us)):
                if not sel.any():
                    continue
                targets = dst[sel]
                dp[S | cbit[targets], targets] = src[sel]
        row = dp[full]
        closes = ((row[us] == vs + 1) & (color[vs] == 0)) | \
                 ((row[vs] == us + 1) & (color[us] == 0))
        if closes.any():
            return True
    return False


def longest_path_exact(g: SimpleGraph, *,
                       exact_budget: int = EXACT_DP_BUDGET) -> list[int]:
    """A maximum-length path as a vertex sequence (subset DP, certified)."""
    if g.n > exact_budget:
        raise BudgetExceededError(
            f"exact longest path needs n <= {exact_budget}, got {g.n}")
    if g.n == 0:
        return []
    masks = _adj_masks(g, list(range(g.n)))
    # layer: subset -> endpoint bitmask; parent chains recovered afterwards
    layer = {1 << v: 1 << v for v in range(g.n)}
    seen_layers = [layer]
    while True:
        nxt: dict[int, int] = {}
        for subset, ends in layer.items():
            rest = ends
            while rest:
                bit = rest & -rest
                rest ^= bit
                v = bit.bit_length() - 1
                cand = masks[v] & ~subset
                while cand:
                    b = cand & -cand
                    cand ^= b
                    key = subset | b
                    nxt[key] = nxt.get(key, 0) | b
        if not nxt:
            break
        layer = nxt
        seen_layers.append(layer)
    last = seen_layers[-1]
    best_subset = next(iter(last))
    best_end = (last[best_subset] & -last[best_subset]).bit_length() - 1
    # walk back through layers to recover the vertex sequence
    path = [best_end]
    subset = best_subset
    for depth in range(len(seen_layers) - 2, -1, -1):
        prev_subset = subset & ~(1 << path[-1])
        prev_ends = seen_layers[depth].get(prev_subset, 0)
        choices = prev_ends & masks[path[-1]]
        if not choices:
            raise AssertionError("path reconstruction lost its parent")
        prev_end = (choices & -choices).bit_length() - 1
        path.append(prev_end)
        subset = prev_subset
    path.reverse()
    return path


def longest_path_length(g: SimpleGraph, **kw) -> int:
    return len(longest_path_exact(g, **kw)) - 1


def has_hamilton_cycle(g: SimpleGraph, *,
                       exact_budget: int = EXACT_DP_BUDGET) -> bool:
    if g.n > exact_budget:
        raise BudgetExceededError(
            f"exact Hamiltonicity needs n <= {exact_budget}, got {g.n}")
    if g.n < 3:
        return False
    return _has_spanning_path_between(g, anchored=True)


def has_hamilton_path_between(g: SimpleGraph, u: int, v: int) -> bool:
    """Spanning path with endpoints u and v (subset DP)."""
    if u == v:
        return g.n == 1
    masks = _adj_masks(g, list(range(g.n)))
    full = (1 << g.n) - 1
    layer = {1 << u: 1 << u}
    while layer:
        nxt: dict[int, int] = {}
        for subset, ends in layer.items():
            if subset == full:
                if ends & (1 << v):
                    return True
                continue
            rest = ends
            while rest:
                bit = rest & -rest
                rest ^= bit
                x = bit.bit_length() - 1
                cand = masks[x] & ~subset
                while cand:
                    b = cand & -cand
                    cand ^= b
                    key = subset | b
                    nxt[key] = nxt.get(key, 0) | b
        layer = nxt
    return False


def _has_spanning_path_between(g: SimpleGraph, anchored: bool = True) -> bool:
    # Hamilton cycle via paths anchored at vertex 0 that close back to 0
    masks = _adj_masks(g, list(range(g.n)))
    full = (1 << g.n) - 1
    layer = {1: 1}
    while layer:
        nxt: dict[int, int] = {}
        for subset, ends in layer.items():
            rest = ends
            while rest:
                bit = rest & -rest
                rest ^= bit
                v = bit.bit_length() - 1
                if subset == full and masks[v] & 1:
                    return True
                cand = masks[v] & ~subset
                while cand:
                    b = cand & -cand
                    cand ^= b
                    key = subset | b
                    nxt[key] = nxt.get(key, 0) | b
        layer = nxt
    return False


def boosters_exact(g: SimpleGraph, *,
                   exact_budget: int = EXACT_DP_BUDGET) -> set:
    """All non-edges whose addition gives a Hamilton cycle or a longer path.

    A graph that is already Hamiltonian has nothing to boost; the empty set
    is returned for it.
    """
    if g.n > exact_budget:
        raise BudgetExceededError(
            f"exact boosters need n <= {exact_budget}, got {g.n}")
    if has_hamilton_cycle(g):
        return set()
    base = longest_path_length(g)
    out = set()
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if g.has_edge(u, v):
                continue
            if has_hamilton_path_between(g, u, v):
                out.add((u, v))
                continue
            g2 = g.copy()
            g2.add_edge(u, v)
            if longest_path_length(g2) > base:
                out.add((u, v))
    return out


# -- Pósa rotations ---------------------------------------------------------

class RotationExplorer:
    """Endpoint closure of a path under rotations with one endpoint fixed.

    The start of ``path`` stays fixed; rotations pivot the other end.  Paths
    for derived endpoints are reconstructed on demand from pivot chains, so
    exploring is cheap even when the closure is large.
    """

    def __init__(self, adj, path: list[int]):
        self.adj = adj
        self.base = list(path)
        self.parent: dict[int, tuple[int, int]] = {path[-1]: (-1, -1)}
        self.queue = [path[-1]]
        self._paths: dict[int, list[int]] = {path[-1]: list(path)}
        self._qi = 0

    @property
    def endpoints(self) -> set:
        return set(self.parent)

    def path_to(self, endpoint: int) -> list[int]:
        return list(self._paths[endpoint])

    def expand_next(self) -> list[int]:
        """Process one queued endpoint; returns newly found endpoints."""
        if self._qi >= len(self.queue):
            return []
        end = self.queue[self._qi]
        self._qi += 1
        path = self._paths[end]
        pos = {v: i for i, v in enumerate(path)}
        new = []
        for pivot in self.adj[end]:
            i = pos.get(pivot)
            if i is None or i >= len(path) - 2:
                continue
            tail = path[i + 1]
            if tail in self.parent:
                continue
            rotated = path[: i + 1] + path[i + 1:][::-1]
            self.parent[tail] = (end, pivot)
            self._paths[tail] = rotated
            self.queue.append(tail)
            new.append(tail)
        return new

    def expand_all(self, limit: int | None = None) -> set:
        while self._qi < len(self.queue):
            if limit is not None and len(self.parent) >= limit:
                break
            self.expand_next()
        return self.endpoints


def posa_rotation_endpoints(g: SimpleGraph, path: list[int], *,
                            verify_budget: int = EXACT_DP_BUDGET,
                            pair_limit: int | None = None):
    """Rotation endpoint set U (path start fixed) and candidate booster pairs.

    Pairs join endpoints reachable from both ends; each pair is re-verified
    against the booster definition when the graph fits the exact budget,
    otherwise tagged rotation-derived and returned unverified.
    """
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise ValueError(f"({a},{b}) is not an edge; not a path of g")
    if len(set(path)) != len(path):
        raise ValueError("path repeats a vertex")
    right = RotationExplorer(g.adj, path)
    right.expand_all()
    pairs = set()
    exact = g.n <= verify_budget
    verified = boosters_exact(g) if exact else None
    for u in sorted(right.endpoints):
        p_u = right.path_to(u)
        left = RotationExplorer(g.adj, p_u[::-1])
        left.expand_all()
        for v in sorted(left.endpoints):
            if u == v or g.has_edge(u, v):
                continue
            pair = (min(u, v), max(u, v))
            if verified is None or pair in verified:
                pairs.add(pair)
        if pair_limit is not None and len(pairs) >= pair_limit:
            break
    return right.endpoints, pairs, right


# -- expanders --------------------------------------------------------------

def external_neighborhood(g: SimpleGraph, S) -> set:
    out: set[int] = set()
    for v in S:
        out |= g.adj[v]
    return out - set(S)


@dataclass
class ExpanderVerdict:
    holds: bool
    witness: set | None
    mode: str
    detail: str = ""


def _expander_check(g: SimpleGraph, d: float, ground: list[int], smax: int,
                    mode: str, samples: int, seed: int) -> ExpanderVerdict:
    if smax < 1:
        return ExpanderVerdict(True, None, "exact", "no set sizes in range")
    degs = [len(g.adj[v]) for v in ground]
    worst = min(degs) if degs else 0
    # any S of size s has |N(S)| >= worst - s + 1, covering small sizes
    s_free = int((worst + 1) // (d + 1)) if d > 0 else smax
    for i, v in enumerate(ground):
        if degs[i] < d:
            return ExpanderVerdict(False, {v}, "exact", "singleton fails")
    checked_exactly = max(1, min(s_free, smax))
    exhaustive = True
    for s in range(2, smax + 1):
        if s <= s_free:
            checked_exactly = s
            continue
        if mode == "exhaustive" or (mode == "auto" and comb(len(ground), s) <= SUBSET_ENUM_CAP):
            for S in itertools.combinations(ground, s):
                if len(external_neighborhood(g, S)) < d * s:
                    return ExpanderVerdict(False, set(S), "exact",
                                           f"size {s} fails")
            checked_exactly = s
        else:
            exhaustive = False
            rng = np.random.default_rng(seed + s)
            ground_arr = np.array(ground)
            for _ in range(max(1, samples // max(1, smax - checked_exactly))):
                S = ground_arr[rng.permutation(len(ground_arr))[:s]]
                if len(external_neighborhood(g, S)) < d * s:
                    return ExpanderVerdict(False, set(int(x) for x in S),
                                           "sampled", f"size {s} fails")
    final_mode = "exact" if exhaustive else "sampled"
    detail = (f"sizes 1..{smax} covered" if exhaustive else
              f"exact to size {checked_exactly}, sampled to {smax}")
    return ExpanderVerdict(True, None, final_mode, detail)


def check_expander(g: SimpleGraph, d: float, eps: float, mode: str = "auto", *,
                   samples: int = 4000, seed: int = 0) -> ExpanderVerdict:
    """Does every S with |S| <= eps*n satisfy |N(S)| >= d|S|?"""
    smax = int(eps * g.n)
    return _expander_check(g, d, list(range(g.n)), smax, mode, samples, seed)


def check_half_expander(g: SimpleGraph, d: float, eps: float,
                        mode: str = "auto", *, samples: int = 4000,
                        seed: int = 0) -> ExpanderVerdict:
    """As check_expander with S restricted to side V1 of the bipartition."""
    if g.bipartition is None:
        raise ValueError("half-expander check needs a bipartitioned graph")
    v1 = sorted(g.bipartition[0])
    smax = int(eps * len(v1))
    return _expander_check(g, d, v1, smax, mode, samples, seed)


# -- bipartite matchings ----------------------------------------------------

def hall_cover_matching(g: SimpleGraph, T) -> tuple[dict | None, set | None]:
    """Matching covering T (subset of side V1), or a Hall violator in T.

    Returns (matching, None) with matching as a T-keyed dict, or
    (None, S) where S subseteq T has |N(S)| < |S|.
    """
    if g.bipartition is None:
        raise ValueError("matching needs a bipartitioned graph")
    v1 = g.bipartition[0]
    T = sorted(T)
    if any(t not in v1 for t in T):
        raise ValueError("T must lie in side V1")
    match_x: dict[int, int] = {}
    match_y: dict[int, int] = {}

    def augment(x, seen_x, seen_y):
        seen_x.add(x)
        for y in sorted(g.adj[x]):
            if y in seen_y:
                continue
            seen_y.add(y)
            if y not in match_y or augment(match_y[y], seen_x, seen_y):
                match_y[y] = x
                match_x[x] = y
                return True
        return False

    for t in T:
        seen_x: set[int] = set()
        seen_y: set[int] = set()
        if not augment(t, seen_x, seen_y):
            return None, seen_x  # all visited side-1 vertices lie in T
    return match_x, None


# -- oriented four-part DFS -------------------------------------------------

def dfs_fourpartite_long_path(parts: list[list[int]], link_graphs: list[SimpleGraph],
                              threshold: int, *,
                              invariant_check: bool = False):
    """Directed DFS through parts X0 -> X1 -> X2 -> X3 -> X0 ...

    link_graphs[i] holds the edges between parts[i] and parts[(i+1) % 4].
    Runs depth-first search following arcs oriented forward; returns
    (stack, True) the first time the active stack reaches ``threshold``
    vertices, else (longest stack seen, False).  The stack always spans a
    directed path; with invariant_check that is re-verified at every step.
    """
    part_of = {}
    for i, p in enumerate(parts):
        for v in p:
            part_of[v] = i
    fwd = {v: [] for p in parts for v in p}
    for i, gi in enumerate(link_graphs):
        nxt = set(parts[(i + 1) % 4])
        for v in parts[i]:
            fwd[v] = sorted(w for w in gi.adj[v] if w in nxt)
    visited: set[int] = set()
    best: list[int] = []
    ptr = {v: 0 for v in fwd}
    for root in parts[0]:
        if root in visited:
            continue
        visited.add(root)
        stack = [root]
        while stack:
            if len(stack) > len(best):
                best = list(stack)
                if len(best) >= threshold:
                    return best, True
            if invariant_check:
                for a, b in zip(stack, stack[1:]):
                    assert b in fwd[a], "stack is not a directed path"
            v = stack[-1]
            advanced = False
            while ptr[v] < len(fwd[v]):
                w = fwd[v][ptr[v]]
                ptr[v] += 1
                if w not in visited:
                    visited.add(w)
                    stack.append(w)
                    advanced = True
                    break
            if not advanced:
                stack.pop()
    return best, False


# -- certificates -----------------------------------------------------------

def verify_path(g: SimpleGraph, seq: list[int]) -> bool:
    if len(set(seq)) != len(seq):
        return False
    return all(g.has_edge(a, b) for a, b in zip(seq, seq[1:]))


def verify_cycle(g: SimpleGraph, seq: list[int]) -> bool:
    if len(seq) < 3:
        return False
    return verify_path(g, seq) and g.has_edge(seq[-1], seq[0])


def verify_matching(g: SimpleGraph, pairs: dict, must_cover=()) -> bool:
    used: set[int] = set()
    for x, y in pairs.items():
        if not g.has_edge(x, y) or x in used or y in used:
            return False
        used.update((x, y))
    return all(t in pairs for t in must_cover)


# -- tree enumeration and the counting oracles ------------------------------

def prufer_to_edges(code, k: int) -> list[tuple[int, int]]:
    """Labeled tree on 0..k-1 from its length-(k-2) code."""
    code = list(code)
    degree = [1] * k
    for c in code:
        degree[c] += 1
    edges = []
    import heapq
    leaves = [v for v in range(k) if degree[v] == 1]
    heapq.heapify(leaves)
    for c in code:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, c), max(leaf, c)))
        degree[c] -= 1
        if degree[c] == 1:
            heapq.heappush(leaves, c)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return edges


def count_low_leaf_trees(k: int, leaf_cap: int) -> tuple[int, float]:
    """(number of labeled trees on k vertices with <= leaf_cap leaves, bound).

    The bound is (e*k)^(2*leaf_cap) * k! / (2*leaf_cap)!; the count is by
    full code enumeration, so k is budget-limited.
    """
    if k > PRUFER_BUDGET:
        raise BudgetExceededError(f"tree enumeration needs k <= {PRUFER_BUDGET}")
    if leaf_cap < 0 or k < 1:
        raise ValueError("need k >= 1 and leaf_cap >= 0")
    bound = (_e * k) ** (2 * leaf_cap) * factorial(k) / factorial(2 * leaf_cap)
    if k == 1:
        return 1, bound
    if k == 2:
        # the single tree is one edge with two leaves
        return (1 if leaf_cap >= 2 else 0), bound
    length = k - 2
    total = k ** length
    counts = 0
    # vectorized over all codes: leaves = k - (#distinct symbols in code)
    chunk = 1 << 20
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        codes = np.empty((len(idx), length), dtype=np.int8)
        x = idx.copy()
        for j in range(length - 1, -1, -1):
            codes[:, j] = x % k
            x //= k
        codes.sort(axis=1)
        distinct = 1 + (codes[:, 1:] != codes[:, :-1]).sum(axis=1)
        counts += int(((k - distinct) <= leaf_cap).sum())
    return counts, bound


def tree_path_edge_sets(g: SimpleGraph) -> list[frozenset]:
    """Edge sets of all non-trivial paths of a tree (one per vertex pair)."""
    paths = []
    for src in range(g.n):
        parent = {src: None}
        order = [src]
        stack = [src]
        while stack:
            u = stack.pop()
            for v in g.adj[u]:
                if v not in parent:
                    parent[v] = u
                    order.append(v)
                    stack.append(v)
        for dst in order:
            if dst <= src:
                continue
            edges = set()
            w = dst
            while parent[w] is not None:
                edges.add((min(w, parent[w]), max(w, parent[w])))
                w = parent[w]
            paths.append(frozenset(edges))
    return paths


def centroid_split(g: SimpleGraph) -> tuple[int, set, set]:
    """Centroid v of a tree plus a split of V - v into A, B, each >= n/4.

    Greedy assignment of the components of g - v, heaviest first, to the
    lighter side; the returned sizes are asserted against the n/4 bound.
    """
    best_v, best_load = -1, g.n + 1
    for v in range(g.n):
        seen = {v}
        load = 0
        for w in g.adj[v]:
            if w in seen:
                continue
            size = 0
            stack = [w]
            seen.add(w)
            while stack:
                x = stack.pop()
                size += 1
                for y in g.adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            load = max(load, size)
        if load < best_load:
            best_v, best_load = v, load
    v = best_v
    comps = []
    seen = {v}
    for w in sorted(g.adj[v]):
        if w in seen:
            continue
        comp = {w}
        stack = [w]
        seen.add(w)
        while stack:
            x = stack.pop()
            for y in g.adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    comps.sort(key=len, reverse=True)
    a: set[int] = set()
    b: set[int] = set()
    for comp in comps:
        (a if len(a) <= len(b) else b).update(comp)
    if len(a) * 4 < g.n or len(b) * 4 < g.n:
        raise AssertionError(
            f"centroid split {len(a)}/{len(b)} misses the n/4 bound at n={g.n}")
    return v, a, b


def count_path_tuples(g: SimpleGraph, r: int) -> tuple[int, tuple[int, set, set]]:
    """Ordered r-tuples of non-trivial paths of a tree with connected union.

    Returns the exact count and the centroid split certificate (v, A, B);
    tuples of paths all passing through v witness count >= (|A|*|B|)^r.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if not is_forest(g) or g.m != g.n - 1:
        raise ValueError("path-tuple counting expects a tree")
    paths = tree_path_edge_sets(g)
    if len(paths) ** r > 4_000_000:
        raise BudgetExceededError("tuple enumeration too large")
    count = 0
    for combo in itertools.product(paths, repeat=r):
        edges = set().union(*combo)
        verts = {v for e in edges for v in e}
        # connected union iff the union forest has |verts| - 1 edges... it is
        # a subforest of a tree, so count components via union-find instead
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in edges:
            parent[find(u)] = find(v)
        roots = {find(v) for v in verts}
        if len(roots) == 1:
            count += 1
    # a single edge leaves nothing to put on the second side of a centroid
    # split; the certificate degenerates to an empty witness of count >= 0
    cert = (0, {1}, set()) if g.n == 2 else centroid_split(g)
    v, a, b = cert
    if count < (len(a) * len(b)) ** r:
        raise AssertionError("count fell below its centroid certificate")
    return count, cert


def rooted_tree_forms(m: int) -> list:
    """Canonical nested-tuple forms of all unordered rooted trees on m nodes."""
    @lru_cache(maxsize=None)
    def forms(size: int) -> tuple:
        if size == 1:
            return ((),)
        out = set()
        # split size-1 nodes among children: iterate multisets of subtrees
        def extend(remaining, max_size, acc):
            if remaining == 0:
                out.add(tuple(sorted(acc)))
                return
            for s in range(min(remaining, max_size), 0, -1):
                for sub in forms(s):
                    extend(remaining - s, s, acc + [sub])
        extend(size - 1, size - 1, [])
        return tuple(sorted(out))
    return list(forms(m))


def _form_to_edges(form, start=0) -> tuple[list, int]:
    edges = []
    nxt = start + 1
    for child in form:
        edges.append((start, nxt))
        sub, nxt2 = _form_to_edges(child, nxt)
        edges.extend(sub)
        nxt = nxt2
    return edges, nxt


def _ahu_canonical(g: SimpleGraph) -> str:
    """Isomorphism-invariant encoding of a free tree (centroid-rooted)."""
    def encode(root, banned) -> str:
        subs = sorted(encode(w, root) for w in g.adj[root] if w != banned)
        return "(" + "".join(subs) + ")"

    # centroid(s): minimize the largest component of g - v
    loads = []
    for v in range(g.n):
        seen = {v}
        worst = 0
        for w in g.adj[v]:
            if w in seen:
                continue
            size = 0
            stack = [w]
            seen.add(w)
            while stack:
                x = stack.pop()
                size += 1
                for y in g.adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            worst = max(worst, size)
        loads.append(worst)
    low = min(loads)
    centers = [v for v, l in enumerate(loads) if l == low]
    return min(encode(c, None) for c in centers)


def free_trees(m: int) -> list[SimpleGraph]:
    """One tree per isomorphism class on m vertices."""
    seen = {}
    for form in rooted_tree_forms(m):
        edges, _ = _form_to_edges(form)
        g = SimpleGraph.from_edges(m, edges)
        seen.setdefault(_ahu_canonical(g), g)
    return [seen[k] for k in sorted(seen)]
