"""Waiter constructions: large components, connectivity, long paths and cycles.

Every recipe here is a ``StagedCore`` written at its design bias and run
through ``reduce_bias``, so the same bookkeeping serves the design game and
any smaller actual bias.  The cores record their own postconditions via
``record_check``; tests assert those and re-verify the built structures on
Client's real graph.
"""

from __future__ import annotations

import math
from collections import deque
from fractions import Fraction

import numpy as np

from ..engine import ForfeitError, ParameterError
from .base import BiasReducer, CoreReducer, StagedCore, reduce_bias


def _ceil_fraction(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


class TrivialDumpCore(StagedCore):
    """Offer the least free elements; used where any Client edge suffices.

    When the bias leaves Client with at most one useful edge (q > n-3 on
    K_n), no structure needs forcing: a single kept edge already realises
    the largest component the edge-count law permits.
    """

    name = "big_component"

    def __init__(self, design_q: int):
        if design_q < 1:
            raise ParameterError(f"bias must be >= 1, got {design_q}")
        self.design_q = design_q

    def params(self) -> dict:
        return {"design_q": self.design_q}

    def begin(self, view) -> None:
        self._ptr = 0

    def instruct(self, view):
        want = self.design_q + 1
        out: list[int] = []
        size = view.board.size
        p = self._ptr
        while len(out) < want and p < size:
            hi = min(p + 65536, size)
            ids = np.arange(p, hi, dtype=np.int64)
            free = ids[view.free_mask(ids)]
            out.extend(int(x) for x in free[: want - len(out)])
            if len(out) < want:
                p = hi
        if len(out) < want:
            return None
        self._ptr = out[-1] + 1
        return out


class BigComponentCore(StagedCore):
    """Force a Client component of min{n', 2(n'-q-1)} vertices on a clique.

    Plays entirely inside the clique spanned by ``vertices`` (n' of them) at
    design bias q with ceil((n'-3)/2) <= q <= n'-3.  Two stages:

    Stage I (n'-q-2 rounds) grows a Client tree while keeping the outside
    vertices on an exact claimed-degree ladder: after round i the outside
    order u_1, u_2, ... has degree j-1 into the tree at position j up to
    min(i+1, q+1), then untouched vertices, then q-i vertices of degree i
    that each keep exactly one free tree edge (their slot).  Round one is a
    star; later rounds offer every slot edge plus the full tree star of the
    first untouched vertex, q+1 edges in all, and both possible Client
    choices preserve the ladder exactly.

    Stage II (n'-q-2+t rounds, t=1 unless q is at its minimum on odd n')
    continues the cascade on the grown component.  Writing m = n'-q-1 for
    the tree size, the outside splits into a ramp of vertices whose free
    degrees into the component are exactly m, m-1, ..., and reserves with
    exactly one free component edge each.  A round offers the ramp top's
    entire free star (m edges) plus every reserve's single edge, q+1 in
    all.  If Client keeps a star edge the top joins the component and the
    rest of the ramp gains one free edge each; if Client keeps a reserve
    edge the reserve joins instead and the fully claimed top falls to the
    reserves.  Either way the shape recurs with one more component vertex
    per round, and no offered edge ever leaves the frontier unclaimed.
    """

    name = "big_component"

    def __init__(self, vertices, design_q: int, name: str | None = None):
        verts = [int(v) for v in vertices]
        n = len(verts)
        if n < 4:
            raise ParameterError(f"component construction needs >= 4 vertices, got {n}")
        low, high = (n - 2) // 2, n - 3
        if not low <= design_q <= high:
            raise ParameterError(
                f"design bias {design_q} outside [{low}, {high}] for {n} vertices")
        if len(set(verts)) != n:
            raise ParameterError("vertex list repeats a vertex")
        self.vertices = verts
        self.design_q = design_q
        if name is not None:
            self.name = name
        # t = 0 exactly at the minimum bias on an odd clique, else 1
        self.t = 0 if (n % 2 == 1 and design_q == (n - 3) // 2) else 1
        self.goal = min(n, 2 * (n - design_q - 1))
        self.total_rounds = 2 * (n - design_q - 2) + self.t

    def params(self) -> dict:
        return {"n": len(self.vertices), "design_q": self.design_q,
                "goal": self.goal}

    def begin(self, view) -> None:
        if not view.board.is_graph:
            raise ParameterError("component construction needs a graph board")
        if max(self.vertices) >= view.board.n:
            raise ParameterError("vertex list exceeds the board")
        n, q = len(self.vertices), self.design_q
        self._stage = "ladder"
        self._round = 0
        self._tree: list[int] = []
        self._lows: list[int] = []
        self._mids: deque[int] = deque()
        self._highs: list[int] = []
        self._slot: dict[int, int] = {}
        self._x = self.vertices[0]
        self._ys = self.vertices[1:q + 2]
        self._zs = self.vertices[q + 2:]
        self._round_map: dict[int, tuple[str, int, int]] = {}

    # -- stage I: the degree ladder ------------------------------------

    def _instruct_ladder(self, view):
        board = view.board
        self._round_map = {}
        out: list[int] = []
        if self._round == 0:
            for y in self._ys:
                eid = board.edge_id(self._x, y)
                self._round_map[eid] = ("mid", y, self._x)
                out.append(eid)
            return out
        for h in self._highs:
            eid = board.edge_id(h, self._slot[h])
            self._round_map[eid] = ("high", h, self._slot[h])
            out.append(eid)
        mid = self._mids[0]
        for w in self._tree:
            eid = board.edge_id(mid, w)
            self._round_map[eid] = ("mid", mid, w)
            out.append(eid)
        return out

    def _observe_ladder(self, view, choice: int) -> None:
        kind, v, _w = self._round_map[choice]
        if self._round == 0:
            rest = [y for y in self._ys if y != v]
            self._tree = [self._x, v]
            self._lows = [self._zs[0], rest[0]]
            self._mids = deque(self._zs[1:])
            self._highs = list(rest[1:])
            self._slot = {h: v for h in self._highs}
        elif kind == "mid":
            # the untouched vertex joins the tree; every slot edge was
            # claimed, so the remaining high vertices point at the newcomer
            self._mids.popleft()
            self._tree.append(v)
            if self._highs:
                moved = self._highs.pop(0)
                del self._slot[moved]
                self._lows.append(moved)
            for h in self._highs:
                self._slot[h] = v
        else:
            # a slot edge was kept: its high vertex joins the tree and the
            # fully claimed star of the untouched vertex puts it on the ladder
            self._tree.append(v)
            self._highs.remove(v)
            del self._slot[v]
            self._lows.append(self._mids.popleft())
            for h in self._highs:
                self._slot[h] = v
        self._round += 1
        if self._round == len(self.vertices) - self.design_q - 2:
            self._check_ladder(view)
            self._begin_cascade(view)

    def _check_ladder(self, view) -> None:
        n, q = len(self.vertices), self.design_q
        tree_arr = np.asarray(self._tree, dtype=np.int64)
        ok = len(self._tree) == n - q - 1
        detail = []
        for j, v in enumerate(self._lows, start=1):
            freedeg = int(view.free_mask(view.board.star_ids(v, tree_arr)).sum())
            if freedeg != len(self._tree) - (j - 1):
                ok = False
                detail.append(f"ladder position {j} has {freedeg} free tree edges")
        for h in self._highs:
            freedeg = int(view.free_mask(view.board.star_ids(h, tree_arr)).sum())
            if freedeg != 1:
                ok = False
                detail.append(f"reserve vertex {h} has {freedeg} free tree edges")
        if len(self._lows) + len(self._highs) != q + 1:
            ok = False
            detail.append("outside count drifted")
        self.record_check(f"{self.name}:tree-ladder", ok,
                          "; ".join(detail) or f"tree {len(self._tree)} vertices, "
                          f"exact ladder over {q + 1} outside vertices")

    # -- stage II: the cascade -----------------------------------------

    def _begin_cascade(self, view) -> None:
        self._stage = "cascade"
        self._component = list(self._tree)
        tree_arr = np.asarray(self._tree, dtype=np.int64)
        # ladder vertices form the ramp and keep their whole free star
        # into the component; stage I reserves keep their one slot edge
        self._ramp: deque[int] = deque(self._lows)
        self._star: dict[int, list[int]] = {}
        for v in self._lows:
            mask = view.free_mask(view.board.star_ids(v, tree_arr))
            self._star[v] = [w for w, m in zip(self._tree, mask) if m]
        self._reserve: dict[int, int] = dict(self._slot)
        self._shape_ok = True

    def _instruct_cascade(self, view):
        board = view.board
        self._round_map = {}
        target = self._ramp[0]
        cands = self._star[target]
        if len(cands) != len(self.vertices) - self.design_q - 1:
            self._shape_ok = False
        keep = self.design_q + 1 - len(self._reserve)
        out: list[int] = []
        for w in cands[:keep]:
            eid = board.edge_id(target, w)
            self._round_map[eid] = ("star", target, w)
            out.append(eid)
        for h, w in self._reserve.items():
            eid = board.edge_id(h, w)
            self._round_map[eid] = ("slot", h, w)
            out.append(eid)
        return out

    def _observe_cascade(self, view, choice: int) -> None:
        kind, absorbed, _w = self._round_map[choice]
        target = self._ramp.popleft()
        del self._star[target]
        if kind == "slot":
            # a reserve vertex joined instead, so the fully claimed target
            # falls back to the reserves
            del self._reserve[absorbed]
            self._reserve[target] = absorbed
        # every survivor regains one free edge, the one to the newcomer
        for u in self._ramp:
            self._star[u].append(absorbed)
        for h in self._reserve:
            self._reserve[h] = absorbed
        self._component.append(absorbed)
        self._round += 1
        if self._round == self.total_rounds:
            self._check_final(view)
            self._stage = "done"

    def _check_final(self, view) -> None:
        vset = set(self.vertices)
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for eid in view.client_edges:
            u, w = view.board.edge_pair(eid)
            if u in vset and w in vset:
                adj[u].append(w)
                adj[w].append(u)
        seen = {self._tree[0]}
        queue = deque(seen)
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        ok = (seen == set(self._component)
              and len(self._component) == self.goal
              and self._shape_ok
              and view.virtual_rounds == self.total_rounds)
        self.record_check(
            f"{self.name}:component-growth", ok,
            f"component {len(self._component)}/{self.goal} vertices in "
            f"{self.total_rounds} rounds")

    # -- core interface ------------------------------------------------

    def instruct(self, view):
        if self._stage == "ladder":
            return self._instruct_ladder(view)
        if self._stage == "cascade":
            return self._instruct_cascade(view)
        return None

    def observe(self, view, instructed, choice: int) -> None:
        if self._stage == "ladder":
            self._observe_ladder(view, choice)
        elif self._stage == "cascade":
            self._observe_cascade(view, choice)


class PathDoublingCore(StagedCore):
    """Grow many vertex-disjoint Client paths by repeated endpoint matching.

    Starting from all n vertices as one-vertex paths, each phase t halves
    the collection of active endpoints into sides X and Y and forces a
    Client matching between them, joining pairs of 2^t-vertex paths into
    2^(t+1)-vertex paths.  Offers only touch the active endpoint of each
    path; when two paths join, the far endpoint on the X side becomes the
    new active endpoint and the far endpoint on the Y side the new far
    one, so cross-path pairs of active endpoints and of far endpoints both
    stay free for the next phase.

    The phase count t* is the largest t with (n/(10q))^(2^t) * 10q still at
    least q^(2/3); each phase stops at its target matching size, whose
    feasibility the constructor checks against the free-pair count bound
    (half^2 - (q+1)) / (q+1+m).
    """

    name = "path_doubling"

    def __init__(self, n: int, design_q: int):
        if n < 2:
            raise ParameterError(f"need at least 2 vertices, got {n}")
        if design_q < n:
            raise ParameterError(
                f"doubling analysis needs bias >= n, got {design_q} < {n}")
        self.n = n
        self.design_q = design_q
        q = design_q
        crit = q * q  # compare cubed bounds against q^2 to avoid roots

        def bound(t: int) -> Fraction:
            return Fraction(n, 10 * q) ** (2 ** t) * 10 * q

        if bound(0) ** 3 < crit:
            raise ParameterError(
                f"bias {q} too large: even single vertices miss the q^(2/3) floor")
        t_star = 0
        while bound(t_star + 1) ** 3 >= crit:
            t_star += 1
        self.t_star = t_star
        self.bounds = [bound(t) for t in range(t_star + 1)]
        self.targets: list[int] = []
        m = n
        for t in range(t_star):
            target = _ceil_fraction(self.bounds[t + 1])
            half = m // 2
            limit = Fraction(half * half - (q + 1), q + 1 + m)
            if target - 1 > limit:
                raise ParameterError(
                    f"phase {t + 1} target {target} exceeds the feasible "
                    f"matching size {limit}")
            self.targets.append(target)
            m = target

    def params(self) -> dict:
        return {"n": self.n, "design_q": self.design_q, "t_star": self.t_star}

    def begin(self, view) -> None:
        if not view.board.is_graph or view.board.n < self.n:
            raise ParameterError("board too small for the path construction")
        self._paths: list[list[int]] = [[v] for v in range(self.n)]
        self._act = np.arange(self.n, dtype=np.int64)
        self._far = np.arange(self.n, dtype=np.int64)
        self._phase = 0
        self._phase_ready = False
        self._done = self.t_star == 0
        if self._done:
            self.record_check("path_doubling:stage-0", True,
                              f"{self.n} single-vertex paths suffice at this bias")

    def _start_phase(self, view) -> None:
        m = len(self._paths)
        half = m // 2
        self._xn = half
        self._yn = m - half
        self._x_end = self._act[:half].copy()
        self._y_end = self._act[half:].copy()
        self._x_alive = np.ones(self._xn, dtype=bool)
        self._y_alive = np.ones(self._yn, dtype=bool)
        self._xi = 0
        self._yi = 0
        self._matched: list[tuple[int, int]] = []
        self._phase_ready = True

    def _instruct_phase(self, view):
        board = view.board
        need = self.design_q + 1
        chunks: list[np.ndarray] = []
        rows: list[tuple[int, np.ndarray]] = []
        got = 0
        xi, yi = self._xi, self._yi
        while got < need and xi < self._xn:
            if not self._x_alive[xi]:
                xi += 1
                yi = 0
                continue
            pos = np.arange(yi, self._yn, dtype=np.int64)
            pos = pos[self._y_alive[pos]]
            if len(pos) == 0:
                xi += 1
                yi = 0
                continue
            ids = board.star_ids(int(self._x_end[xi]), self._y_end[pos])
            free = view.free_mask(ids)
            pos, ids = pos[free], ids[free]
            k = min(need - got, len(ids))
            chunks.append(ids[:k])
            rows.append((xi, pos[:k]))
            got += k
            if k < len(ids):
                yi = int(pos[k])
            else:
                xi += 1
                yi = 0
        self._xi, self._yi = xi, yi
        self._offer_rows = rows
        self._offer_ids = (chunks[0] if len(chunks) == 1
                           else np.concatenate(chunks)
                           if chunks else np.empty(0, dtype=np.int64))
        return self._offer_ids

    def _observe_phase(self, view, choice: int) -> None:
        idx = int(np.flatnonzero(self._offer_ids == choice)[0])
        for xp, pos in self._offer_rows:
            if idx < len(pos):
                yp = int(pos[idx])
                break
            idx -= len(pos)
        self._x_alive[xp] = False
        self._y_alive[yp] = False
        self._matched.append((xp, yp))
        if len(self._matched) == self.targets[self._phase]:
            self._finish_phase(view)

    def _finish_phase(self, view) -> None:
        t = self._phase
        joined: list[list[int]] = []
        act: list[int] = []
        far: list[int] = []
        for xp, yp in self._matched:
            px = self._paths[xp]
            py = self._paths[self._xn + yp]
            verts = px[::-1] + py  # far_x .. act_x, act_y .. far_y
            joined.append(verts)
            act.append(verts[0])
            far.append(verts[-1])
        self._paths = joined
        self._act = np.asarray(act, dtype=np.int64)
        self._far = np.asarray(far, dtype=np.int64)
        m = len(joined)
        size_ok = all(len(p) == 2 ** (t + 1) for p in joined)
        bound_ok = m >= self.bounds[t + 1]
        self.record_check(
            f"path_doubling:phase-{t + 1}-count", bound_ok and size_ok,
            f"{m} disjoint paths of {2 ** (t + 1)} vertices, "
            f"bound {float(self.bounds[t + 1]):.1f}")
        self._check_endpoint_freeness(view, t + 1)
        self._phase += 1
        self._phase_ready = False
        if self._phase == self.t_star:
            self._done = True
            self._verify_paths(view)

    def _check_endpoint_freeness(self, view, t: int) -> None:
        board = view.board
        ok = True
        for ends in (self._act, self._far):
            m = len(ends)
            if m < 2:
                continue
            if m * (m - 1) // 2 <= 2_000_000:
                iu, iv = np.triu_indices(m, k=1)
                us, vs = ends[iu], ends[iv]
            else:
                rng = np.random.default_rng(0)
                iu = rng.integers(0, m, size=200_000)
                iv = rng.integers(0, m, size=200_000)
                keep = iu != iv
                us, vs = ends[iu[keep]], ends[iv[keep]]
            ids = board.edge_ids(np.minimum(us, vs), np.maximum(us, vs))
            if not view.free_mask(ids).all():
                ok = False
        self.record_check(f"path_doubling:phase-{t}-endpoints-free", ok,
                          "cross-path endpoint pairs stay free")

    def _verify_paths(self, view) -> None:
        owned = set(view.client_edges)
        board = view.board
        ok = True
        for p in self._paths:
            for a, b in zip(p, p[1:]):
                if board.edge_id(a, b) not in owned:
                    ok = False
        used = [v for p in self._paths for v in p]
        ok = ok and len(used) == len(set(used))
        self.record_check("path_doubling:paths-in-client-graph", ok,
                          f"{len(self._paths)} paths of {2 ** self.t_star} "
                          "vertices, disjoint, all edges Client's")

    def instruct(self, view):
        if self._done:
            return None
        if not self._phase_ready:
            self._start_phase(view)
        return self._instruct_phase(view)

    def observe(self, view, instructed, choice: int) -> None:
        if not self._done and self._phase_ready:
            self._observe_phase(view, choice)

    @property
    def paths(self) -> list[list[int]]:
        return self._paths


class LongCycleCore(StagedCore):
    """Force a Client cycle of length at least ceil(eta/6) when q = n - eta.

    Five stages: grow a Client path of ceil(eta/2) vertices inside a
    reserved vertex block, attach fresh outside vertices to the first sixth
    of the path (one round per disjoint attachment group), attach a second
    reserved block to the last sixth, then link the two attached sets with
    one more round.  The kept link closes a cycle through the middle of the
    path; its length is the distance between the two attachment points
    plus 3.
    """

    name = "long_cycle"

    def __init__(self, n: int, design_q: int, eta: int):
        if design_q < 1:
            raise ParameterError(f"bias must be >= 1, got {design_q}")
        if not 12 <= eta <= n - 1:
            raise ParameterError(f"cycle surplus {eta} outside [12, {n - 1}]")
        self.n, self.design_q, self.eta = n, design_q, eta
        q = design_q
        # side block size ceil(n^(3/4)) via exact integer fourth root of n^3
        cube = n ** 3
        s = round(cube ** 0.25)
        while s ** 4 < cube:
            s += 1
        while (s - 1) ** 4 >= cube:
            s -= 1
        self.side = s
        self.groups = math.isqrt(n)
        self.group_size = math.isqrt(math.isqrt(n))
        self.path_len = (eta + 1) // 2
        self.prefix_end = eta // 6
        self.suffix_start = -(-eta // 3)
        n3 = n - 2 * s
        checks = [
            (2 * s < n, "side blocks swallow the whole vertex set"),
            (self.groups * self.group_size <= s,
             "attachment groups do not fit in a side block"),
            (q + 1 <= n3 - (self.path_len - 1),
             "not enough fresh vertices to keep extending the path"),
            (self.group_size * self.prefix_end >= q + 1,
             "prefix attachment grid smaller than one offer"),
            (self.group_size * (self.path_len - self.suffix_start + 1) >= q + 1,
             "suffix attachment grid smaller than one offer"),
            (self.groups * self.groups >= q + 1,
             "linking grid smaller than one offer"),
            (1 <= self.prefix_end < self.suffix_start <= self.path_len,
             "path too short to separate the attachment windows"),
        ]
        for ok, why in checks:
            if not ok:
                raise ParameterError(f"(n={n}, q={q}, eta={eta}): {why}")

    def params(self) -> dict:
        return {"n": self.n, "design_q": self.design_q, "eta": self.eta}

    def begin(self, view) -> None:
        if not view.board.is_graph or view.board.n < self.n:
            raise ParameterError("board too small for the cycle construction")
        s = self.side
        self._block1 = list(range(s))
        self._block2 = list(range(s, 2 * s))
        inner = list(range(2 * s, self.n))
        self._path = [inner[0]]
        self._avail = inner[1:]
        self._avail_pos = {v: i for i, v in enumerate(self._avail)}
        self._stage = "path"
        self._group = 0
        self._attach1: list[tuple[int, int]] = []
        self._attach2: list[tuple[int, int]] = []
        self.cycle: list[int] | None = None

    def _instruct_path(self, view):
        board = view.board
        u = self._path[-1]
        cands = self._avail[: self.design_q + 1]
        self._round_map = {board.edge_id(u, x): x for x in cands}
        return list(self._round_map.keys())

    def _observe_path(self, view, choice: int) -> None:
        x = self._round_map[choice]
        i = self._avail_pos.pop(x)
        last = self._avail.pop()
        if last != x:
            self._avail[i] = last
            self._avail_pos[last] = i
        self._path.append(x)
        if len(self._path) == self.path_len:
            owned = set(view.client_edges)
            ok = all(view.board.edge_id(a, b) in owned
                     for a, b in zip(self._path, self._path[1:]))
            self.record_check("long_cycle:path", ok,
                              f"Client path of {self.path_len} vertices")
            self._stage = "attach1"
            self._group = 0

    def _grid_offer(self, view, rows: list[int], cols: list[int], tag: str):
        board = view.board
        cols_arr = np.asarray(cols, dtype=np.int64)
        need = self.design_q + 1
        out: list[int] = []
        self._round_map = {}
        for ridx, v in enumerate(rows):
            ids = board.star_ids(v, cols_arr)
            for cidx, eid in enumerate(ids.tolist()):
                if len(out) == need:
                    return out
                self._round_map[eid] = (tag, ridx, cidx)
                out.append(eid)
        return out

    def _instruct_attach(self, view, block: list[int], lo: int, hi: int):
        g = self._group
        rows = block[g * self.group_size:(g + 1) * self.group_size]
        cols = self._path[lo:hi]
        return self._grid_offer(view, rows, cols, "attach")

    def instruct(self, view):
        if self._stage == "path":
            return self._instruct_path(view)
        if self._stage == "attach1":
            return self._instruct_attach(view, self._block1, 0, self.prefix_end)
        if self._stage == "attach2":
            return self._instruct_attach(view, self._block2,
                                         self.suffix_start - 1, self.path_len)
        if self._stage == "link":
            rows = [w for w, _ in self._attach1]
            cols = [w for w, _ in self._attach2]
            return self._grid_offer(view, rows, cols, "link")
        return None

    def observe(self, view, instructed, choice: int) -> None:
        if self._stage == "path":
            self._observe_path(view, choice)
            return
        if self._stage in ("attach1", "attach2"):
            _tag, ridx, cidx = self._round_map[choice]
            g = self._group
            if self._stage == "attach1":
                vert = self._block1[g * self.group_size + ridx]
                self._attach1.append((vert, cidx + 1))
            else:
                vert = self._block2[g * self.group_size + ridx]
                self._attach2.append((vert, self.suffix_start + cidx))
            self._group += 1
            if self._group == self.groups:
                side = 1 if self._stage == "attach1" else 2
                got = self._attach1 if side == 1 else self._attach2
                self.record_check(
                    f"long_cycle:attach-{side}", len(got) == self.groups,
                    f"{len(got)} attachments from disjoint groups")
                self._stage = "attach2" if side == 1 else "link"
                self._group = 0
            return
        if self._stage == "link":
            _tag, ridx, cidx = self._round_map[choice]
            w1, a = self._attach1[ridx]
            w2, b = self._attach2[cidx]
            self.cycle = self._path[a - 1:b] + [w2, w1]
            need = -(-self.eta // 6)
            owned = set(view.client_edges)
            ring = self.cycle
            ok = all(view.board.edge_id(ring[i], ring[(i + 1) % len(ring)]) in owned
                     for i in range(len(ring)))
            self.record_check(
                "long_cycle:linked-cycle", ok and len(ring) >= need,
                f"cycle of {len(ring)} vertices, bound {need}")
            self._stage = "done"


class KConnectedCore(StagedCore):
    """Force a k-vertex-connected Client graph.

    Splits the vertices into k near-equal parts, forces a spanning
    connected Client subgraph inside each part, then for every part pair
    gives each vertex one round of q+1 parallel-class edges into the other
    part (shift classes 0..q one way, q+1..2q+1 the other, so no edge is
    ever offered twice).  Any k-1 removed vertices miss some part, and
    every surviving vertex keeps a Client edge into that still-connected
    part.
    """

    name = "k_connected"

    def __init__(self, n: int, design_q: int, k: int):
        if k < 2:
            raise ParameterError(f"connectivity order must be >= 2, got {k}")
        if design_q < 1:
            raise ParameterError(f"bias must be >= 1, got {design_q}")
        self.n, self.design_q, self.k = n, design_q, k

    def params(self) -> dict:
        return {"n": self.n, "design_q": self.design_q, "k": self.k}

    def begin(self, view) -> None:
        n, q, k = self.n, self.design_q, self.k
        s = n // k
        if 2 * (q + 1) > s:
            raise ForfeitError(
                "waiter", f"parts of {s} vertices cannot host two disjoint "
                f"{q + 1}-regular edge classes", stage="setup")
        self._parts = [list(map(int, p)) for p in np.array_split(np.arange(n), k)]
        self._jobs: list[tuple] = []
        for part in self._parts:
            inner = BigComponentCore(part, len(part) // 2 - 1, name="k_connected")
            self._jobs.append(("sub", CoreReducer(inner, q)))
        board = view.board
        for a in range(k):
            for b in range(a + 1, k):
                pa, pb = self._parts[a][:s], self._parts[b][:s]
                for c in range(s):
                    ids = [board.edge_id(pa[c], pb[(c + r) % s])
                           for r in range(q + 1)]
                    self._jobs.append(("fixed", ids))
                for d in range(s):
                    ids = [board.edge_id(pa[(d - r) % s], pb[d])
                           for r in range(q + 1, 2 * q + 2)]
                    self._jobs.append(("fixed", ids))
        for a, part in enumerate(self._parts):
            for x in part[s:]:
                for b in range(k):
                    if b != a:
                        ids = [board.edge_id(x, self._parts[b][j])
                               for j in range(q + 1)]
                        self._jobs.append(("fixed", ids))
        self._ptr = 0
        self._mode: tuple | None = None
        self._begun_subs: set[int] = set()
        self._finished = False

    def instruct(self, view):
        while self._ptr < len(self._jobs):
            kind, payload = self._jobs[self._ptr]
            if kind == "fixed":
                self._mode = ("fixed",)
                return list(payload)
            if self._ptr not in self._begun_subs:
                payload.begin(view)
                self._begun_subs.add(self._ptr)
            ids = payload.instruct(view)
            if ids is None:
                self._ptr += 1
                continue
            self._mode = ("sub", payload)
            return ids
        if not self._finished:
            self._finished = True
            self._check_cross_cover(view)
        return None

    def observe(self, view, instructed, choice: int) -> None:
        if self._mode is None:
            return
        if self._mode[0] == "fixed":
            self._ptr += 1
        else:
            self._mode[1].observe(view, instructed, choice)
        self._mode = None

    def _check_cross_cover(self, view) -> None:
        part_of = np.empty(self.n, dtype=np.int64)
        for i, part in enumerate(self._parts):
            part_of[part] = i
        covered = np.zeros((self.n, self.k), dtype=bool)
        for eid in view.client_edges:
            u, v = view.board.edge_pair(eid)
            if u < self.n and v < self.n:
                covered[u, part_of[v]] = True
                covered[v, part_of[u]] = True
        ok = True
        for v in range(self.n):
            for p in range(self.k):
                if p != part_of[v] and not covered[v, p]:
                    ok = False
        self.record_check("k_connected:cross-cover", ok,
                          "every vertex keeps a Client edge into every other part")

    def stage_checks(self) -> list:
        out = list(super().stage_checks())
        for kind, payload in self._jobs:
            if kind == "sub":
                out.extend(payload.stage_checks())
        return out


def waiter_big_component(n: int, q: int) -> BiasReducer:
    """Waiter forcing a component of min{n, 2(n-q-1)} Client vertices."""
    if n < 2:
        raise ParameterError(f"need at least 2 vertices, got {n}")
    if q < 1:
        raise ParameterError(f"bias must be >= 1, got {q}")
    if q > n - 3:
        return reduce_bias(TrivialDumpCore(q), q)
    design = max(q, (n - 2) // 2)
    return reduce_bias(BigComponentCore(range(n), design), q)


def waiter_connectivity(n: int, q: int, vertices=None) -> BiasReducer:
    """Waiter forcing a connected Client graph; needs q <= floor(n/2) - 1."""
    verts = list(range(n)) if vertices is None else list(vertices)
    size = len(verts)
    if size < 4:
        raise ParameterError(f"connectivity game needs >= 4 vertices, got {size}")
    design = size // 2 - 1
    if q > design:
        raise ParameterError(
            f"bias {q} > {design}: Client ends with fewer than {size - 1} "
            "edges, so connectivity is out of reach")
    return reduce_bias(BigComponentCore(verts, design, name="connectivity"), q)


def waiter_path_doubling(n: int, q: int) -> BiasReducer:
    """Waiter forcing many disjoint Client paths of 2^t* vertices each."""
    return reduce_bias(PathDoublingCore(n, max(q, n)), q)


def waiter_long_cycle(n: int, q: int, eta: int) -> BiasReducer:
    """Waiter forcing a Client cycle of length at least ceil(eta/6)."""
    return reduce_bias(LongCycleCore(n, q, eta), q)


def waiter_k_connected(n: int, q: int, k: int) -> BiasReducer:
    """Waiter forcing a k-vertex-connected Client graph."""
    return reduce_bias(KConnectedCore(n, q, k), q)
