"""Expander-driven Waiter constructions: cycle spectra up to pancyclicity.

The seed object is a bipartite half-expander forced by degree balancing;
seven of them tile a six-part split of the playing set, and everything
later rides on that union: an oriented depth-first path supplies chords
closing one cycle per target length, rotation endpoint pairs grow the path
into a spanning cycle, and a two-block split with a bridging fan turns
spanning cycles into cycles of every length.  As in ``building``, each
construction is a ``StagedCore`` at its design bias, records its own
postconditions, and forfeits when an offer cannot be filled as prescribed.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ..engine import CLIENT, ForfeitError, ParameterError
from .. import graphs as gr
from .base import CoreReducer, StagedCore, reduce_bias
from .building import BigComponentCore


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


class _SubsetAdj:
    """Adjacency view of the live Client graph restricted to a vertex set."""

    __slots__ = ("adj", "mask")

    def __init__(self, adj, mask):
        self.adj = adj
        self.mask = mask

    def __getitem__(self, v: int):
        mask = self.mask
        return [u for u in self.adj[v] if mask[u]]


def _bipartite_client_graph(view, side_a, side_b):
    """Client's edges between two vertex sets, relabeled to local ids.

    Returns (graph, local-id map); side_a occupies locals 0..len(side_a)-1.
    """
    loc: dict[int, int] = {}
    for i, v in enumerate(side_a):
        loc[int(v)] = i
    base = len(side_a)
    for j, v in enumerate(side_b):
        loc[int(v)] = base + j
    g = gr.SimpleGraph(len(loc),
                       bipartition=(range(base), range(base, len(loc))))
    adj = view.client_adj
    for v in side_a:
        lv = loc[int(v)]
        for u in adj[int(v)]:
            lu = loc.get(int(u))
            if lu is not None and lu >= base:
                g.add_edge(lv, lu)
    return g, loc


def _client_owned(view, us, vs) -> bool:
    us = np.asarray(us, dtype=np.int64)
    vs = np.asarray(vs, dtype=np.int64)
    ids = view.board.edge_ids(np.minimum(us, vs), np.maximum(us, vs))
    return bool((view.state.own.owners(ids) == CLIENT).all())


def _client_cycle_ok(view, seq, length: int | None = None) -> bool:
    k = len(seq)
    if k < 3 or (length is not None and k != length):
        return False
    if len(set(seq)) != k:
        return False
    us = np.asarray(seq, dtype=np.int64)
    return _client_owned(view, us, np.roll(us, -1))


def _client_path_ok(view, seq) -> bool:
    if len(seq) < 2 or len(set(seq)) != len(seq):
        return False
    return _client_owned(view, seq[:-1], seq[1:])


def _subset_connected(view, verts) -> bool:
    arr = np.asarray(verts, dtype=np.int64)
    if len(arr) == 0:
        return True
    mask = np.zeros(view.board.n, dtype=bool)
    mask[arr] = True
    seen = np.zeros(view.board.n, dtype=bool)
    start = int(arr[0])
    seen[start] = True
    stack = [start]
    count = 0
    adj = view.client_adj
    while stack:
        v = stack.pop()
        count += 1
        for u in adj[v]:
            if mask[u] and not seen[u]:
                seen[u] = True
                stack.append(u)
    return count == len(arr)


def _subset_expander_verdict(view, verts, d_chk: float, eps: float,
                             samples: int) -> gr.ExpanderVerdict:
    """Expansion verdict for Client's graph induced on ``verts``.

    Valid while every Client edge at these vertices stays among them, which
    holds at each call site: the constructions finish a block before any
    cross edges exist.  A high enough minimum degree settles all set sizes
    outright; otherwise the induced graph is materialized and checked.
    """
    n = len(verts)
    smax = int(eps * n)
    if smax < 1:
        return gr.ExpanderVerdict(True, None, "exact", "no set sizes in range")
    arr = np.asarray(verts, dtype=np.int64)
    worst = int(view.client_degree[arr].min())
    if worst >= d_chk and int((worst + 1) / (d_chk + 1)) >= smax:
        return gr.ExpanderVerdict(
            True, None, "exact", f"degree floor {worst} settles sizes 1..{smax}")
    loc = {int(v): i for i, v in enumerate(verts)}
    g = gr.SimpleGraph(n)
    adj = view.client_adj
    for v in verts:
        lv = loc[int(v)]
        for u in adj[int(v)]:
            lu = loc.get(int(u))
            if lu is not None and lu > lv:
                g.add_edge(lv, lu)
    return gr.check_expander(g, d_chk, eps, samples=samples)


class HalfExpanderCore(StagedCore):
    """Force Client's graph from ``side_a`` into ``side_b`` to half-expand.

    The window stage sweeps the board between side_a and the first
    floor(5|side_a|/6) vertices of side_b: each round offers design_q+1
    free window edges at the side_a vertex of least Client degree, spread
    over distinct window vertices of least Client degree.  Client keeps one
    edge at that vertex per round whatever it picks, so every side_a vertex
    ends with exactly floor(window/(design_q+1)) Client edges.  The repair
    stage then hunts for inclusion-minimal subsets of side_a that fail to
    expand by factor d (exhaustively for the sizes the degree floor leaves
    open, within a subset budget) and plays d rounds per pooled vertex
    toward vertices beyond the window that are still isolated here, so
    distinct repaired vertices gain disjoint sets of d fresh neighbours.
    The finished bipartite graph is checked to (d, 2/(3d))-expand from
    side_a, exhaustively for small subset sizes and sampled beyond.
    """

    name = "half_expander"

    PAIR_BUDGET = 500_000
    TRIPLE_BUDGET = 200_000

    def __init__(self, side_a, side_b, d: int, design_q: int,
                 name: str | None = None, *, check_samples: int = 240):
        a = [int(v) for v in side_a]
        b = [int(v) for v in side_b]
        if len(set(a)) != len(a) or len(set(b)) != len(b) or set(a) & set(b):
            raise ParameterError("sides must be disjoint lists without repeats")
        if d < 1:
            raise ParameterError(f"expansion factor must be >= 1, got {d}")
        if design_q < 1:
            raise ParameterError(f"bias must be >= 1, got {design_q}")
        n1 = len(a)
        window = 5 * n1 // 6
        if window < design_q + 1:
            raise ParameterError(
                f"window of {window} cannot spread offers of {design_q + 1}")
        if window // (design_q + 1) < d:
            raise ParameterError(
                f"window rounds give degree {window // (design_q + 1)}, "
                f"below the expansion factor {d}")
        extras = len(b) - window
        if extras < d * (design_q + 1):
            raise ParameterError(
                f"{extras} vertices beyond the window cannot feed repairs "
                f"needing {d * (design_q + 1)}")
        self._a = a
        self._b = b
        self._d = d
        self.design_q = design_q
        if name is not None:
            self.name = name
        self._window = window
        self._r_cap = max(0, _ceil_div(n1, 7 * d) - 1)
        self._samples = check_samples

    def params(self) -> dict:
        return {"side_a": len(self._a), "side_b": len(self._b),
                "d": self._d, "design_q": self.design_q}

    def begin(self, view) -> None:
        if not view.board.is_graph:
            raise ParameterError("half-expander needs a graph board")
        if max(max(self._a), max(self._b)) >= view.board.n:
            raise ParameterError("vertex list exceeds the board")
        self._a_arr = np.asarray(self._a, dtype=np.int64)
        self._w_arr = np.asarray(self._b[:self._window], dtype=np.int64)
        self._deg_a = np.zeros(len(self._a), dtype=np.int64)
        self._deg_w = np.zeros(self._window, dtype=np.int64)
        self._free_cnt = np.empty(len(self._a), dtype=np.int64)
        for i, v in enumerate(self._a):
            ids = view.board.star_ids(v, self._w_arr)
            self._free_cnt[i] = int(view.free_mask(ids).sum())
        self._rounds = 0
        self._stage = "window"

    # -- window stage ---------------------------------------------------

    def _instruct_window(self, view):
        need = self.design_q + 1
        elig = self._free_cnt >= need
        if not elig.any():
            return None
        key = np.where(elig, self._deg_a, np.iinfo(np.int64).max)
        row = int(np.argmin(key))
        star = view.board.star_ids(self._a[row], self._w_arr)
        cand = np.flatnonzero(view.free_mask(star))
        if len(cand) < need:
            raise ForfeitError(
                "waiter", f"window row holds {len(cand)} free edges, "
                f"round needs {need}", stage="window")
        wkey = self._deg_w[cand] * np.int64(self._window + 1) + cand
        if len(cand) > need:
            part = np.argpartition(wkey, need - 1)[:need]
            sel = cand[part[np.argsort(wkey[part], kind="stable")]]
        else:
            sel = cand[np.argsort(wkey, kind="stable")]
        self._cur = (row, sel)
        return star[sel]

    def _observe_window(self, view, instructed, choice: int) -> None:
        row, sel = self._cur
        idx = int(np.flatnonzero(np.asarray(instructed) == choice)[0])
        self._deg_a[row] += 1
        self._deg_w[sel[idx]] += 1
        self._free_cnt[row] -= self.design_q + 1
        self._rounds += 1

    def _close_window(self, view) -> None:
        da = self._deg_a
        spread = int(da.max() - da.min()) if len(da) else 0
        self.record_check(
            f"{self.name}:window", spread <= 1,
            f"{self._rounds} rounds, side degrees {int(da.min())}.."
            f"{int(da.max())}, window degrees {int(self._deg_w.min())}.."
            f"{int(self._deg_w.max())}")
        weak, note = self._weak_vertices(view)
        if len(weak) > self._r_cap:
            raise ForfeitError(
                "waiter", f"{len(weak)} repair vertices exceed the cap "
                f"{self._r_cap}", stage="repair")
        self._jobs: deque[int] = deque(x for x in weak for _ in range(self._d))
        self._pool = list(self._b[self._window:])
        self._gained: dict[int, list[int]] = {x: [] for x in weak}
        self._search_note = note
        self._stage = "repair"

    def _weak_vertices(self, view) -> tuple[list[int], str]:
        """Vertices of inclusion-minimal subsets of side_a that expand below
        factor d, searched for the sizes the degree floor leaves open."""
        d = self._d
        n1 = len(self._a)
        worst = int(self._deg_a.min()) if n1 else 0
        s_free = (worst + 1) // (d + 1)
        singles = [i for i in range(n1) if self._deg_a[i] < d]
        if s_free >= 3 and not singles:
            return [], f"degree floor {worst} settles search sizes"
        in_b = np.zeros(view.board.n, dtype=bool)
        in_b[np.asarray(self._b, dtype=np.int64)] = True
        nbrs = []
        for v in self._a:
            nbrs.append({u for u in view.client_adj[v] if in_b[u]})
        weak = set(singles)
        notes = [f"{len(singles)} singletons"]
        fine = [i for i in range(n1) if i not in weak]
        if s_free < 2:
            if len(fine) * (len(fine) - 1) // 2 <= self.PAIR_BUDGET:
                pair_hits = 0
                for ii, i in enumerate(fine):
                    ni = nbrs[i]
                    for j in fine[ii + 1:]:
                        if len(ni | nbrs[j]) < 2 * d:
                            weak.update((i, j))
                            pair_hits += 1
                notes.append(f"{pair_hits} pairs")
            else:
                notes.append("pair search skipped (budget)")
        members = sorted(self._a[i] for i in weak)
        return members, ", ".join(notes)

    # -- repair stage ---------------------------------------------------

    def _instruct_repair(self, view):
        need = self.design_q + 1
        x = self._jobs[0]
        parr = np.asarray(self._pool, dtype=np.int64)
        star = view.board.star_ids(x, parr)
        cand = np.flatnonzero(view.free_mask(star))[:need]
        if len(cand) < need:
            raise ForfeitError(
                "waiter", f"only {len(cand)} isolated targets free for "
                f"repairs, round needs {need}", stage="repair")
        self._cur = (x, [self._pool[int(c)] for c in cand])
        return star[cand]

    def _observe_repair(self, view, instructed, choice: int) -> None:
        x, ys = self._cur
        idx = int(np.flatnonzero(np.asarray(instructed) == choice)[0])
        y = ys[idx]
        self._pool.remove(y)
        self._gained[x].append(y)
        self._jobs.popleft()
        self._rounds += 1

    def _finish(self, view) -> None:
        gained = self._gained
        flat = [y for ys in gained.values() for y in ys]
        ok_rep = (all(len(ys) == self._d for ys in gained.values())
                  and len(flat) == len(set(flat)))
        self.record_check(
            f"{self.name}:repair", ok_rep,
            (f"{len(gained)} vertices repaired; {self._search_note}"
             if gained else f"no repairs needed; {self._search_note}"))
        g, _ = _bipartite_client_graph(view, self._a, self._b)
        verdict = gr.check_half_expander(
            g, self._d, 2.0 / (3 * self._d), samples=self._samples)
        self.record_check(
            f"{self.name}:expansion", verdict.holds,
            f"{verdict.mode}: {verdict.detail or verdict.witness}")
        self._stage = "done"

    # -- dispatch -------------------------------------------------------

    def instruct(self, view):
        if self._stage == "window":
            out = self._instruct_window(view)
            if out is not None:
                return out
            self._close_window(view)
        if self._stage == "repair":
            if self._jobs:
                return self._instruct_repair(view)
            self._finish(view)
        return None

    def observe(self, view, instructed, choice: int) -> None:
        if self._stage == "window":
            self._observe_window(view, instructed, choice)
        elif self._stage == "repair":
            self._observe_repair(view, instructed, choice)


class ExpanderCyclesCore(StagedCore):
    """Force Client cycles of every length 3..ceil(n'/6), connected, expanding.

    The vertex set splits into six near-equal parts.  First seven bipartite
    half-expanders go up between prescribed part pairs; their union is rich
    enough for everything after.  An oriented depth-first search then
    threads a path of ceil(n'/5) vertices through parts 1-4 in rotation,
    and the path anchors (every fourth vertex, design_q+1 of them) are
    matched into part 5, their partners onward into part 6.  Each target
    length takes a single round: a chord between two path positions closes
    lengths 1 or 3 mod 4 directly, and detouring through one or both
    matched relays supplies lengths 0 and 2 mod 4.  Finally parts 2-6 are
    each made spanning-connected by the component cascade, which ties the
    whole graph together through the expander edges.
    """

    name = "expander_cycles"

    PAIRS = ((0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 1))

    def __init__(self, vertices, d: int, design_q: int,
                 name: str | None = None, *, check_samples: int = 240):
        verts = [int(v) for v in vertices]
        if d < 4:
            raise ParameterError(f"expansion degree must be >= 4, got {d}")
        if design_q < 1:
            raise ParameterError(f"bias must be >= 1, got {design_q}")
        if name is not None:
            self.name = name
        self._verts = verts
        self._d = d
        self.design_q = design_q
        self._samples = check_samples
        n = len(verts)
        self._parts = [[int(x) for x in chunk]
                       for chunk in np.array_split(np.asarray(verts), 6)]
        min_part = min(len(p) for p in self._parts)
        self._m_target = _ceil_div(n, 5)
        self._k_max = _ceil_div(n, 6)
        if self._k_max < 3:
            raise ParameterError(f"{n} vertices leave no cycle lengths to force")
        if 4 * design_q + self._k_max >= self._m_target:
            raise ParameterError(
                f"chord positions need a path of {4 * design_q + self._k_max + 1}"
                f" vertices, target is {self._m_target}")
        if design_q + 1 > min_part // (2 * d):
            raise ParameterError(
                f"{design_q + 1} anchors exceed the matching bound "
                f"{min_part // (2 * d)}")
        if design_q > (min_part - 2) // 2:
            raise ParameterError(
                f"bias {design_q} exceeds the linkage design "
                f"{(min_part - 2) // 2}")
        self._subs = [
            HalfExpanderCore(self._parts[ai], self._parts[bi], d, design_q,
                             name=f"{self.name}:G{t + 1}",
                             check_samples=check_samples)
            for t, (ai, bi) in enumerate(self.PAIRS)]

    def params(self) -> dict:
        return {"n": len(self._verts), "d": self._d,
                "design_q": self.design_q}

    def begin(self, view) -> None:
        if not view.board.is_graph:
            raise ParameterError("cycle spectrum needs a graph board")
        if max(self._verts) >= view.board.n:
            raise ParameterError("vertex list exceeds the board")
        self._stage = "expanders"
        self._sub_i = 0
        self._subs[0].begin(view)
        self._rounds = 0
        self._cycles: dict[int, list[int]] = {}
        self._p_sets = [set(p) for p in self._parts]

    # -- half-expander stage --------------------------------------------

    def _expander_instruct(self, view):
        while self._sub_i < len(self._subs):
            out = self._subs[self._sub_i].instruct(view)
            if out is not None:
                return out
            self._sub_i += 1
            if self._sub_i < len(self._subs):
                self._subs[self._sub_i].begin(view)
        return None

    # -- path threading and relays --------------------------------------

    def _thread_path(self, view) -> None:
        board = view.board
        links = []
        for i in range(4):
            gl = gr.SimpleGraph(board.n)
            nxt = self._p_sets[(i + 1) % 4]
            for v in self._parts[i]:
                for u in view.client_adj[v]:
                    if u in nxt:
                        gl.add_edge(v, u)
            links.append(gl)
        path, reached = gr.dfs_fourpartite_long_path(
            self._parts[:4], links, self._m_target)
        del links
        if not reached:
            raise ForfeitError(
                "waiter", f"oriented search reached {len(path)} of "
                f"{self._m_target} path vertices", stage="path")
        aligned = all(path[i] in self._p_sets[i % 4] for i in range(len(path)))
        self.record_check(
            f"{self.name}:path", aligned and _client_path_ok(view, path),
            f"{len(path)} vertices threaded through four parts")
        self._path = path
        anchors = [path[4 * i] for i in range(self.design_q + 1)]
        g5, loc5 = _bipartite_client_graph(view, self._parts[0], self._parts[4])
        m5, viol = gr.hall_cover_matching(g5, [loc5[a] for a in anchors])
        if m5 is None:
            raise ForfeitError(
                "waiter", f"no relay matching: {len(viol)} anchors crowd "
                "their neighbourhood", stage="matching")
        base5 = len(self._parts[0])
        self._mx = {a: self._parts[4][m5[loc5[a]] - base5] for a in anchors}
        g6, loc6 = _bipartite_client_graph(view, self._parts[4], self._parts[5])
        m6, viol = gr.hall_cover_matching(
            g6, [loc6[self._mx[a]] for a in anchors])
        if m6 is None:
            raise ForfeitError(
                "waiter", f"no second relay matching for {len(viol)} vertices",
                stage="matching")
        base6 = len(self._parts[4])
        self._my = {self._mx[a]: self._parts[5][m6[loc6[self._mx[a]]] - base6]
                    for a in anchors}
        xs = [self._mx[a] for a in anchors]
        ys = [self._my[x] for x in xs]
        ok_m = (len(set(xs)) == len(xs) and len(set(ys)) == len(ys)
                and _client_owned(view, anchors, xs)
                and _client_owned(view, xs, ys))
        self.record_check(f"{self.name}:matching", ok_m,
                          f"{len(anchors)} anchors matched through both relays")

    # -- chord rounds ---------------------------------------------------

    def _chord_pairs(self, k: int) -> list[tuple[int, int]]:
        path, q = self._path, self.design_q
        if k % 4 == 1:
            j = (k - 1) // 4
            return [(path[4 * i], path[4 * i + 4 * j]) for i in range(q + 1)]
        if k % 4 == 3:
            j = (k + 1) // 4
            return [(path[4 * i], path[4 * i + 4 * j - 2])
                    for i in range(q + 1)]
        if k % 4 == 0:
            j = k // 4
            return [(self._mx[path[4 * i]], path[4 * i + 4 * j - 2])
                    for i in range(q + 1)]
        j = (k - 2) // 4
        return [(self._my[self._mx[path[4 * i]]], path[4 * i + 4 * j - 1])
                for i in range(q + 1)]

    def _chord_cycle(self, k: int, i: int) -> list[int]:
        path = self._path
        if k % 4 == 1:
            j = (k - 1) // 4
            return path[4 * i: 4 * i + 4 * j + 1]
        if k % 4 == 3:
            j = (k + 1) // 4
            return path[4 * i: 4 * i + 4 * j - 1]
        if k % 4 == 0:
            j = k // 4
            return path[4 * i: 4 * i + 4 * j - 1] + [self._mx[path[4 * i]]]
        j = (k - 2) // 4
        x = self._mx[path[4 * i]]
        return path[4 * i: 4 * i + 4 * j] + [self._my[x], x]

    def _instruct_chord(self, view):
        board = view.board
        pairs = self._chord_pairs(self._k)
        ids = np.asarray([board.edge_id(u, v) for u, v in pairs],
                         dtype=np.int64)
        self._chord_map = {int(e): i for i, e in enumerate(ids)}
        return ids

    def _observe_chord(self, view, instructed, choice: int) -> None:
        i = self._chord_map[int(choice)]
        self._cycles[self._k] = self._chord_cycle(self._k, i)
        self._k += 1

    # -- linkage stage --------------------------------------------------

    def _begin_linkage(self, view) -> None:
        self._links = []
        for pi in range(1, 6):
            part = self._parts[pi]
            inner = BigComponentCore(part, (len(part) - 2) // 2,
                                     name=f"{self.name}:link{pi + 1}")
            self._links.append(CoreReducer(inner, self.design_q))
        self._link_i = 0
        self._links[0].begin(view)

    def _linkage_instruct(self, view):
        while self._link_i < len(self._links):
            out = self._links[self._link_i].instruct(view)
            if out is not None:
                return out
            self._link_i += 1
            if self._link_i < len(self._links):
                self._links[self._link_i].begin(view)
        return None

    # -- final verification ---------------------------------------------

    def _finish(self, view) -> None:
        bad = [k for k in range(3, self._k_max + 1)
               if not _client_cycle_ok(view, self._cycles.get(k, ()), k)]
        self.record_check(
            f"{self.name}:cycles", not bad,
            f"lengths 3..{self._k_max} certified" if not bad
            else f"invalid lengths {bad[:5]}")
        self.record_check(
            f"{self.name}:connected", _subset_connected(view, self._verts),
            f"{len(self._verts)} vertices in one Client component")
        verdict = _subset_expander_verdict(
            view, self._verts, self._d / 2 - 1, 1.0 / (20 * self._d),
            self._samples)
        self.record_check(
            f"{self.name}:expander", verdict.holds,
            f"{verdict.mode}: {verdict.detail or verdict.witness}")
        budget = 200 * len(self._verts) * self._d
        self.record_check(
            f"{self.name}:rounds", self._rounds <= budget,
            f"{self._rounds} rounds of the {budget} allowed")

    # -- dispatch -------------------------------------------------------

    def instruct(self, view):
        if self._stage == "expanders":
            out = self._expander_instruct(view)
            if out is not None:
                return out
            self._thread_path(view)
            self._stage = "chords"
            self._k = 3
        if self._stage == "chords":
            if self._k <= self._k_max:
                return self._instruct_chord(view)
            self._begin_linkage(view)
            self._stage = "linkage"
        if self._stage == "linkage":
            out = self._linkage_instruct(view)
            if out is not None:
                return out
            self._finish(view)
            self._stage = "done"
        return None

    def observe(self, view, instructed, choice: int) -> None:
        self._rounds += 1
        if self._stage == "expanders":
            self._subs[self._sub_i].observe(view, instructed, choice)
        elif self._stage == "chords":
            self._observe_chord(view, instructed, choice)
        elif self._stage == "linkage":
            self._links[self._link_i].observe(view, instructed, choice)

    def stage_checks(self) -> list:
        out = []
        for sub in self._subs:
            out.extend(sub.stage_checks())
        for link in getattr(self, "_links", []):
            out.extend(link.stage_checks())
        out.extend(getattr(self, "_stage_checks", []))
        return out

    @property
    def path(self) -> list[int]:
        return list(self._path)

    @property
    def cycles(self) -> dict:
        return self._cycles


class HamiltonianExpanderCore(StagedCore):
    """Extend the cycle-spectrum construction to a spanning Client cycle.

    The spectrum stage runs the six-part construction with expansion degree
    6, leaving Client connected with a long chordable path.  The booster
    stage grows that path one vertex per round: rotations with the path
    start pinned yield endpoint pairs whose edge closes a cycle on the
    path's vertex set, the round offers design_q+1 free such pairs, and
    whichever one Client keeps closes the cycle, which then swallows one
    outside vertex through any Client edge leaving it.  When the path
    spans every vertex the kept pair completes a Hamilton cycle.
    """

    name = "hamiltonian_expander"

    def __init__(self, vertices, design_q: int, name: str | None = None, *,
                 check_samples: int = 240):
        verts = [int(v) for v in vertices]
        if name is not None:
            self.name = name
        inner_design = max(1, _ceil_div(len(verts), 6000))
        if design_q > inner_design:
            raise ParameterError(
                f"bias {design_q} exceeds the spectrum stage design "
                f"{inner_design} on {len(verts)} vertices")
        self._verts = verts
        self._n = len(verts)
        self.design_q = design_q
        self._cyc = ExpanderCyclesCore(verts, 6, inner_design,
                                       name=f"{self.name}:spectrum",
                                       check_samples=check_samples)
        self._red = CoreReducer(self._cyc, design_q)

    def params(self) -> dict:
        return {"n": self._n, "design_q": self.design_q}

    def begin(self, view) -> None:
        self._stage = "spectrum"
        self._red.begin(view)
        self._ham: list[int] | None = None
        self._brounds = 0

    def _begin_boosters(self, view) -> None:
        mask = np.zeros(view.board.n, dtype=bool)
        mask[np.asarray(self._verts, dtype=np.int64)] = True
        self._adjp = _SubsetAdj(view.client_adj, mask)
        self._path = self._cyc.path
        self._pos = set(self._path)
        self._outside = [v for v in self._verts if v not in self._pos]
        self._stage = "boosters"

    def _instruct_boosters(self, view):
        if self._brounds > self._n:
            raise ForfeitError(
                "waiter", "booster rounds exceeded the vertex count",
                stage="boosters")
        board = view.board
        need = self.design_q + 1
        out: list[int] = []
        self._bmap: dict[int, tuple] = {}
        for base in (self._path, self._path[::-1]):
            ex = gr.RotationExplorer(self._adjp, base)
            anchor = base[0]
            qi = 0
            while len(out) < need:
                if qi < len(ex.queue):
                    e = ex.queue[qi]
                    qi += 1
                    eid = int(board.edge_id(anchor, e))
                    if eid not in self._bmap and view.is_free(eid):
                        self._bmap[eid] = (ex, e)
                        out.append(eid)
                    continue
                before = len(ex.queue)
                ex.expand_all(limit=before + 4 * need + 8)
                if len(ex.queue) == before:
                    break
            if len(out) >= need:
                break
        if len(out) < need:
            raise ForfeitError(
                "waiter", f"{len(out)} free endpoint pairs reachable, "
                f"round needs {need}", stage="boosters")
        return np.asarray(out, dtype=np.int64)

    def _observe_boosters(self, view, choice: int) -> None:
        self._brounds += 1
        ex, e = self._bmap[int(choice)]
        cyc = ex.path_to(e)
        if len(cyc) == self._n:
            self._ham = cyc
            self._finish(view)
            return
        att = None
        pos = self._pos
        for oi, z in enumerate(self._outside):
            for u in view.client_adj[z]:
                if u in pos:
                    att = (oi, z, u)
                    break
            if att is not None:
                break
        if att is None:
            raise ForfeitError(
                "waiter", "no Client edge joins the cycle to the rest",
                stage="boosters")
        oi, z, u = att
        last = self._outside.pop()
        if oi < len(self._outside):
            self._outside[oi] = last
        i = cyc.index(u)
        self._path = [z] + cyc[i:] + cyc[:i]
        pos.add(z)

    def _finish(self, view) -> None:
        seq = self._ham
        ok = (seq is not None and set(seq) == set(self._verts)
              and _client_cycle_ok(view, seq, self._n)
              and self._brounds <= self._n)
        self.record_check(
            f"{self.name}:hamilton", ok,
            f"spanning cycle of {self._n} after {self._brounds} booster rounds")
        self._stage = "done"

    def instruct(self, view):
        if self._stage == "spectrum":
            out = self._red.instruct(view)
            if out is not None:
                return out
            self._begin_boosters(view)
        if self._stage == "boosters":
            return self._instruct_boosters(view)
        return None

    def observe(self, view, instructed, choice: int) -> None:
        if self._stage == "spectrum":
            self._red.observe(view, instructed, choice)
        elif self._stage == "boosters":
            self._observe_boosters(view, choice)

    def stage_checks(self) -> list:
        out = list(self._red.stage_checks())
        out.extend(getattr(self, "_stage_checks", []))
        return out

    @property
    def hamilton(self) -> list[int]:
        return list(self._ham)

    @property
    def cycles(self) -> dict:
        return self._cyc.cycles


class PancyclicCore(StagedCore):
    """Force a Client cycle of every length from 3 to n.

    The board splits into a large block and a small block of n//7 - 1
    vertices; each is driven to a spanning Client cycle by the Hamilton
    construction, read as Hamilton paths P and R.  One bridging round
    joins P's far end to R's start, and the rotation endpoints of R (with
    its start pinned) become the fan: round j offers design_q+1 fresh
    edges from P's j-th vertex to fan endpoints, and the kept edge closes
    a cycle of length n-j+1 running down P, across the bridge and through
    the rotated R.  Lengths below the small block's size come with the
    large block's own cycle spectrum, which reaches far enough to meet
    the fan.
    """

    name = "pancyclic"

    ROTATION_FLOOR = 120

    def __init__(self, n: int, design_q: int, name: str | None = None, *,
                 check_samples: int = 240):
        if name is not None:
            self.name = name
        n2 = n // 7 - 1
        if n2 < 4:
            raise ParameterError(f"{n} vertices leave no usable small block")
        n1 = n - n2
        if _ceil_div(n1, 6) < n2 + 1:
            raise ParameterError(
                "short-cycle spectrum cannot reach the fan lengths")
        self._n = n
        self._n1 = n1
        self._n2 = n2
        self.design_q = design_q
        self._v1 = list(range(n1))
        self._v2 = list(range(n1, n))
        self._h1 = HamiltonianExpanderCore(self._v1, design_q,
                                           name=f"{self.name}:large",
                                           check_samples=check_samples)
        self._h2 = HamiltonianExpanderCore(self._v2, design_q,
                                           name=f"{self.name}:small",
                                           check_samples=check_samples)

    def params(self) -> dict:
        return {"n": self._n, "design_q": self.design_q,
                "small_block": self._n2}

    def begin(self, view) -> None:
        if not view.board.is_graph or view.board.n < self._n:
            raise ParameterError("pancyclic construction exceeds the board")
        self._stage = "large"
        self._h1.begin(view)
        self._fan: dict[int, tuple[int, int]] = {}

    # -- bridge and fan -------------------------------------------------

    def _instruct_bridge(self, view):
        need = self.design_q + 1
        vend = self._p1[-1]
        cand = np.asarray(self._v2[:need], dtype=np.int64)
        ids = view.board.star_ids(vend, cand)
        if not view.free_mask(ids).all():
            raise ForfeitError("waiter", "bridge edges are not free",
                               stage="bridge")
        return ids

    def _observe_bridge(self, view, choice: int) -> None:
        u, v = view.board.edge_pair(int(choice))
        w1 = v if u == self._p1[-1] else u
        c2 = self._h2.hamilton
        i = c2.index(w1)
        self._pr = c2[i:] + c2[:i]
        mask = np.zeros(view.board.n, dtype=bool)
        mask[np.asarray(self._v2, dtype=np.int64)] = True
        ex = gr.RotationExplorer(_SubsetAdj(view.client_adj, mask), self._pr)
        ex.expand_all()
        self._ex2 = ex
        order = sorted(ex.endpoints)
        floor = max(self.design_q + 1, _ceil_div(self._n2, self.ROTATION_FLOOR))
        self.record_check(
            f"{self.name}:endpoints", len(order) >= floor,
            f"{len(order)} rotation endpoints, floor {floor}")
        if len(order) < self.design_q + 1:
            raise ForfeitError(
                "waiter", f"{len(order)} rotation endpoints cannot fill a fan "
                f"round", stage="fan")
        self._s_arr = np.asarray(order, dtype=np.int64)
        self._j = 1
        self._stage = "fan"

    def _instruct_fan(self, view):
        need = self.design_q + 1
        vj = self._p1[self._j - 1]
        star = view.board.star_ids(vj, self._s_arr)
        cand = np.flatnonzero(view.free_mask(star))[:need]
        if len(cand) < need:
            raise ForfeitError(
                "waiter", f"{len(cand)} free fan edges at position {self._j}",
                stage="fan")
        self._fan_map = {int(star[c]): int(self._s_arr[c]) for c in cand}
        return star[cand]

    def _observe_fan(self, view, choice: int) -> None:
        s = self._fan_map[int(choice)]
        self._fan[self._n - self._j + 1] = (self._j, s)
        self._j += 1
        if self._j == self._n1:
            self._finish(view)

    def cycle_for(self, k: int) -> list[int] | None:
        """Certificate cycle of length k, once play has produced one."""
        if k in self._fan:
            j, s = self._fan[k]
            return self._p1[j - 1:] + self._ex2.path_to(s)
        seq = self._h1.cycles.get(k)
        return list(seq) if seq is not None else None

    def _finish(self, view) -> None:
        bad = []
        for k in range(3, self._n + 1):
            seq = self.cycle_for(k)
            if seq is None or not _client_cycle_ok(view, seq, k):
                bad.append(k)
                if len(bad) > 4:
                    break
        self.record_check(
            f"{self.name}:spectrum", not bad,
            f"lengths 3..{self._n} certified" if not bad
            else f"invalid lengths {bad[:5]}")
        self._stage = "done"

    # -- dispatch -------------------------------------------------------

    def instruct(self, view):
        if self._stage == "large":
            out = self._h1.instruct(view)
            if out is not None:
                return out
            self._p1 = self._h1.hamilton
            self._stage = "small"
            self._h2.begin(view)
        if self._stage == "small":
            out = self._h2.instruct(view)
            if out is not None:
                return out
            self._stage = "bridge"
        if self._stage == "bridge":
            return self._instruct_bridge(view)
        if self._stage == "fan":
            if self._j < self._n1:
                return self._instruct_fan(view)
        return None

    def observe(self, view, instructed, choice: int) -> None:
        if self._stage == "large":
            self._h1.observe(view, instructed, choice)
        elif self._stage == "small":
            self._h2.observe(view, instructed, choice)
        elif self._stage == "bridge":
            self._observe_bridge(view, choice)
        elif self._stage == "fan":
            self._observe_fan(view, choice)

    def stage_checks(self) -> list:
        out = list(self._h1.stage_checks())
        out.extend(self._h2.stage_checks())
        out.extend(getattr(self, "_stage_checks", []))
        return out


# -- factories ---------------------------------------------------------------

HAM_BIAS_FRACTION = 1.0 / 30000.0


def waiter_half_expander_split(n: int, q: int, d: int):
    """Half-expander from the first half of K_n into the second."""
    if n < 4:
        raise ParameterError(f"half-expander split needs n >= 4, got {n}")
    half = n // 2
    core = HalfExpanderCore(range(half), range(half, n), d, q)
    return reduce_bias(core)


def waiter_expander_cycles(n: int, d: int, q: int):
    """Cycle spectrum, connectivity and expansion on K_n at bias q."""
    design = max(1, _ceil_div(n, 1000 * d))
    if q > design:
        raise ParameterError(
            f"bias {q} exceeds the construction cap {design} at n={n}, d={d}")
    return reduce_bias(ExpanderCyclesCore(range(n), d, design))


def waiter_hamiltonian_expander(n: int, q: int,
                                bias_fraction: float = HAM_BIAS_FRACTION):
    """Spanning Client cycle on K_n at bias q (q below bias_fraction * n)."""
    cap = max(1, int(bias_fraction * n))
    if q > cap:
        raise ParameterError(
            f"bias {q} exceeds the Hamilton construction cap {cap} at n={n}")
    return reduce_bias(HamiltonianExpanderCore(range(n), q))


def waiter_pancyclic(n: int, q: int):
    """Client cycles of every length 3..n on K_n at bias q."""
    return reduce_bias(PancyclicCore(n, q))
