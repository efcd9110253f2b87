"""Explicit set families on boards and the strategies driven by them.

A SetFamily is a multi-family of element-id sets.  Against a game state each
set is Dead (contains a Waiter element), Completed (fully Client-owned) or
Alive.  Two potentials matter: the avoidance potential, sum over non-dead
sets of (q+1)^-(uncollected size), which bounds how many sets Client can be
forced to complete; and the transversal potential, sum of 2^-(|A|/(2q-1)),
whose being below one half signals that Waiter can force Client to hit
every set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, e as _e

import numpy as np

from .board import Board
from .engine import (BudgetExceededError, ForfeitError, GameState, CLIENT,
                     FREE, WAITER, ParameterError)
from .strategies.base import Client, Waiter

DEAD = "dead"
ALIVE = "alive"
COMPLETED = "completed"

# families at most this large get exact rational potentials by default
EXACT_FAMILY_CAP = 50_000
FLOAT_TIE_TOL = 1e-9
DEFAULT_SET_BUDGET = 6_000_000


class SetFamily:
    """Multi-family of element-id sets; duplicates are meaningful.

    Stored flat (concatenated ids plus offsets) so statuses and potentials
    vectorize over millions of sets.
    """

    def __init__(self, board: Board, sets, label: str = ""):
        self.board = board
        self.label = label
        flat: list[np.ndarray] = []
        offsets = [0]
        total = 0
        for s in sets:
            ids = np.asarray(sorted(int(x) for x in s), dtype=np.int64)
            if len(ids) == 0:
                raise ParameterError("family sets must be non-empty")
            if len(ids) != len(np.unique(ids)):
                raise ParameterError("a family set repeats an element")
            if ids[0] < 0 or ids[-1] >= board.size:
                raise ParameterError("family set id outside the board")
            flat.append(ids)
            total += len(ids)
            offsets.append(total)
        self.flat = (np.concatenate(flat) if flat
                     else np.zeros(0, dtype=np.int64))
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.sizes = np.diff(self.offsets)

    @classmethod
    def _from_flat(cls, board: Board, flat: np.ndarray, offsets: np.ndarray,
                   label: str = "") -> "SetFamily":
        fam = cls.__new__(cls)
        fam.board = board
        fam.label = label
        fam.flat = np.asarray(flat, dtype=np.int64)
        fam.offsets = np.asarray(offsets, dtype=np.int64)
        fam.sizes = np.diff(fam.offsets)
        return fam

    def __len__(self) -> int:
        return len(self.sizes)

    def set_at(self, i: int) -> tuple:
        return tuple(int(x) for x in self.flat[self.offsets[i]:self.offsets[i + 1]])

    def as_tuples(self):
        for i in range(len(self)):
            yield self.set_at(i)

    def member_index(self) -> dict:
        """element id -> array of indices of sets containing it."""
        order = np.argsort(self.flat, kind="stable")
        sorted_elems = self.flat[order]
        set_of = np.repeat(np.arange(len(self), dtype=np.int64), self.sizes)[order]
        index: dict[int, np.ndarray] = {}
        bounds = np.flatnonzero(np.diff(sorted_elems)) + 1
        starts = np.concatenate(([0], bounds))
        stops = np.concatenate((bounds, [len(sorted_elems)]))
        for a, b in zip(starts, stops):
            if a < b:
                index[int(sorted_elems[a])] = set_of[a:b]
        return index

    def statuses(self, state: GameState) -> np.ndarray:
        """Per-set status codes against a state: 0 dead, 1 alive, 2 completed."""
        if len(self) == 0:
            return np.zeros(0, dtype=np.int8)
        owners = state.own.owners(self.flat)
        starts = self.offsets[:-1]
        dead = np.maximum.reduceat((owners == WAITER).astype(np.int8), starts) > 0
        uncollected = np.add.reduceat((owners != CLIENT).astype(np.int64), starts)
        out = np.ones(len(self), dtype=np.int8)
        out[uncollected == 0] = 2
        out[dead] = 0
        return out

    def uncollected_counts(self, state: GameState) -> np.ndarray:
        owners = state.own.owners(self.flat)
        return np.add.reduceat((owners != CLIENT).astype(np.int64),
                               self.offsets[:-1])

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            for i in range(len(self)):
                fh.write(" ".join(str(x) for x in self.set_at(i)) + "\n")

    @staticmethod
    def load(path, board: Board, label: str = "") -> "SetFamily":
        sets = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    sets.append([int(x) for x in line.split()])
        return SetFamily(board, sets, label=label)

    def __repr__(self):
        return f"SetFamily({self.label or 'unnamed'}, {len(self)} sets)"


@dataclass
class PotentialReport:
    phi: object
    psi: float
    psi_criterion: bool
    dead: int
    alive: int
    completed: int


def family_potential_phi(family: SetFamily, q: int, state: GameState | None = None,
                         exact: bool | None = None):
    """Avoidance potential at a state (initial state when omitted).

    Dead sets weigh nothing; any other set A weighs (q+1)^-(uncollected),
    so a completed set weighs exactly 1.  Small families get exact
    rationals, large ones floats.
    """
    if q < 1:
        raise ParameterError("potential needs q >= 1")
    if len(family) == 0:
        return Fraction(0) if (exact or exact is None) else 0.0
    if state is None:
        remaining = family.sizes
        dead = np.zeros(len(family), dtype=bool)
    else:
        status = family.statuses(state)
        dead = status == 0
        remaining = family.uncollected_counts(state)
    if exact is None:
        exact = len(family) <= EXACT_FAMILY_CAP
    if exact:
        base = q + 1
        total = Fraction(0)
        for size in remaining[~dead]:
            total += Fraction(1, base ** int(size))
        return total
    weights = np.power(float(q + 1), -remaining.astype(float))
    weights[dead] = 0.0
    return float(weights.sum())


def family_potential_psi(family: SetFamily, q: int) -> tuple[float, bool]:
    """Transversal potential: sum of 2^-(|A|/(2q-1)) and the < 1/2 test."""
    if q < 1:
        raise ParameterError("potential needs q >= 1")
    if len(family) == 0:
        return 0.0, True
    value = float(np.exp2(-family.sizes.astype(float) / (2 * q - 1)).sum())
    return value, value < 0.5


def psi_uniform(count: int, set_size: int, q: int) -> float:
    """Transversal potential of `count` sets all of one size, without
    materializing them."""
    return count * 2.0 ** (-set_size / (2 * q - 1))


def biclique_psi_bound(n_left: int, n_right: int, a: int, b: int, q: int) -> float:
    """Closed-form bound (e n/a)^a (e m/b)^b 2^(-ab/(2q)) for the family of
    all a-by-b bicliques across an n_left/n_right bipartition."""
    return ((_e * n_left / a) ** a) * ((_e * n_right / b) ** b) \
        * 2.0 ** (-(a * b) / (2 * q))


def potential_report(family: SetFamily, q: int, state: GameState) -> PotentialReport:
    status = family.statuses(state)
    phi = family_potential_phi(family, q, state)
    psi, crit = family_potential_psi(family, q)
    return PotentialReport(
        phi=phi, psi=psi, psi_criterion=crit,
        dead=int((status == 0).sum()),
        alive=int((status == 1).sum()),
        completed=int((status == 2).sum()),
    )


class MinimizePotentialClient(Client):
    """Client keeping the avoidance potential from ever rising.

    On each offer it takes the element x whose survivors (alive sets meeting
    the offer in exactly {x}) carry the least weight; everything else the
    offer touches dies anyway.  Ties break to the least id.
    """

    name = "min_potential"

    def __init__(self, family: SetFamily, exact: bool | None = None):
        self.family = family
        self.exact = exact
        self._index = None

    def params(self) -> dict:
        return {"family": self.family.label or "custom",
                "sets": len(self.family)}

    def begin(self, state: GameState) -> None:
        fam = self.family
        self._index = fam.member_index()
        self._q = state.q
        if self.exact is None:
            self.exact = len(fam) <= EXACT_FAMILY_CAP
        owners = state.own.owners(fam.flat)
        starts = fam.offsets[:-1]
        self._dead = (np.maximum.reduceat(
            (owners == WAITER).astype(np.int8), starts) > 0) \
            if len(fam) else np.zeros(0, dtype=bool)
        self._remaining = fam.uncollected_counts(state) if len(fam) \
            else np.zeros(0, dtype=np.int64)

    def _offer_profile(self, offer):
        """Unique affected sets, how many offered ids each contains, and the
        lone offered id for the singly-met ones."""
        idx_arrays = [self._index.get(int(x), None) for x in offer]
        hits = [(x, arr) for x, arr in zip(offer, idx_arrays) if arr is not None]
        if not hits:
            return None
        sets = np.concatenate([arr for _, arr in hits])
        elems = np.concatenate([np.full(len(arr), int(x), dtype=np.int64)
                                for x, arr in hits])
        uniq, inv = np.unique(sets, return_inverse=True)
        counts = np.bincount(inv, minlength=len(uniq))
        elem_sum = np.bincount(inv, weights=elems.astype(float),
                               minlength=len(uniq)).astype(np.int64)
        return uniq, counts, elem_sum

    def choose(self, state: GameState, offer) -> int:
        offer = [int(x) for x in offer]
        profile = self._offer_profile(offer)
        if profile is None:
            return min(offer)
        uniq, counts, elem_sum = profile
        single = counts == 1
        live = single & ~self._dead[uniq] & (self._remaining[uniq] > 0)
        if not live.any():
            return min(offer)
        surv_sets = uniq[live]
        surv_elem = elem_sum[live]  # the one offered id each set contains
        rem = self._remaining[surv_sets]
        if self.exact:
            base = self._q + 1
            gain: dict[int, Fraction] = {x: Fraction(0) for x in offer}
            for eid, r in zip(surv_elem, rem):
                gain[int(eid)] += Fraction(1, base ** int(r))
            best = min(offer, key=lambda x: (gain[x], x))
            return best
        weights = np.power(float(self._q + 1), -rem.astype(float))
        gain = {x: 0.0 for x in offer}
        for eid, w in zip(surv_elem, weights):
            gain[int(eid)] += float(w)
        floor = min(gain.values())
        near = [x for x in offer if gain[x] <= floor + FLOAT_TIE_TOL * (1 + floor)]
        return min(near)

    def observe(self, state: GameState, offer, choice: int) -> None:
        choice = int(choice)
        for x in offer:
            x = int(x)
            arr = self._index.get(x)
            if arr is None:
                continue
            if x == choice:
                self._remaining[arr] -= 1
            else:
                self._dead[arr] = True


class ForceTransversalClientTracker:
    """Shared bookkeeping for the transversal waiter: per-set hit flags and
    free counts, refreshed incrementally."""

    def __init__(self, family: SetFamily, state: GameState):
        self.family = family
        self.index = family.member_index()
        owners = state.own.owners(family.flat)
        starts = family.offsets[:-1]
        n = len(family)
        self.hit = (np.maximum.reduceat((owners == CLIENT).astype(np.int8),
                                        starts) > 0) if n else np.zeros(0, bool)
        self.free = (np.add.reduceat((owners == FREE).astype(np.int64), starts)
                     if n else np.zeros(0, dtype=np.int64))

    def apply(self, offer, choice: int) -> None:
        for x in offer:
            arr = self.index.get(int(x))
            if arr is None:
                continue
            self.free[arr] -= 1
            if int(x) == choice:
                self.hit[arr] = True

    def hopeless(self) -> np.ndarray:
        return np.flatnonzero(~self.hit & (self.free == 0))


class ForceTransversalWaiter(Waiter):
    """Waiter heuristic pressing Client to hit every set of the family.

    Offers the free elements with the highest endangered-set score
    (each unhit set spreads 2^-(free/(2q-1)) across its free elements).
    Success is not guaranteed; an unhit set with no free elements left is a
    forfeit, with that set as the certificate.
    """

    name = "force_transversal"

    def __init__(self, family: SetFamily):
        self.family = family
        self.tracker: ForceTransversalClientTracker | None = None

    def params(self) -> dict:
        return {"family": self.family.label or "custom",
                "sets": len(self.family)}

    def begin(self, state: GameState) -> None:
        self.tracker = ForceTransversalClientTracker(self.family, state)
        self._q = state.q

    def offer(self, state: GameState):
        tr = self.tracker
        lost = tr.hopeless()
        if len(lost):
            raise ForfeitError(
                "waiter", "a set ran out of free elements before Client hit it",
                certificate=self.family.set_at(int(lost[0])))
        pending = np.flatnonzero(~tr.hit)
        if not len(pending):
            return None
        want = state.offer_size()
        scores: dict[int, float] = {}
        denom = 2 * self._q - 1
        for i in pending:
            ids = self.family.flat[self.family.offsets[i]:self.family.offsets[i + 1]]
            free_ids = ids[state.free_mask(ids)]
            if not len(free_ids):
                continue
            share = 2.0 ** (-len(free_ids) / denom) / len(free_ids)
            for x in free_ids:
                scores[int(x)] = scores.get(int(x), 0.0) + share
        ranked = sorted(scores, key=lambda x: (-scores[x], x))[:want]
        if len(ranked) < want:
            extra = state.dump_offer()
            for x in extra:
                if x not in scores:
                    ranked.append(int(x))
                    if len(ranked) == want:
                        break
        return ranked

    def observe(self, state: GameState, offer, choice: int) -> None:
        self.tracker.apply(offer, int(choice))


def transversal_verified(family: SetFamily, state: GameState) -> bool:
    """Did Client end up with at least one element of every set?"""
    if len(family) == 0:
        return True
    owners = state.own.owners(family.flat)
    starts = family.offsets[:-1]
    hit = np.maximum.reduceat((owners == CLIENT).astype(np.int8), starts) > 0
    return bool(hit.all())


# -- family builders --------------------------------------------------------

def cycle_family_size(n: int, m: int, max_len: int | None = None) -> int:
    top = n if max_len is None else min(max_len, n)
    return sum(comb(n, k) * factorial(k - 1) // 2 for k in range(m, top + 1))


def build_cycle_family(n: int, m: int, *, max_len: int | None = None,
                       budget: int = DEFAULT_SET_BUDGET) -> SetFamily:
    """Edge sets of all cycles of K_n with length from m up to max_len.

    The family for lengths m..n realizes the cycle-avoidance potential;
    max_len exists because lengths beyond Client's final edge count can
    never complete, so truncating them preserves the guarantee while
    keeping enumeration affordable.
    """
    if m < 3 or m > n:
        raise ParameterError("cycle lengths need 3 <= m <= n")
    top = n if max_len is None else min(max_len, n)
    total = cycle_family_size(n, m, top)
    if total > budget:
        raise BudgetExceededError(
            f"cycle family would hold {total} sets, budget {budget}")
    board = Board.complete_graph(n)
    chunks = []
    counts = 0
    for k in range(m, top + 1):
        subs = np.asarray(list(itertools.combinations(range(n), k)),
                          dtype=np.int64)
        if len(subs) == 0:
            continue
        # one canonical traversal per cycle: anchor at the least vertex and
        # orient so the second vertex is below the last
        for perm in itertools.permutations(range(1, k)):
            if perm[0] > perm[-1]:
                continue
            ring = subs[:, (0,) + perm]
            nxt = np.roll(ring, -1, axis=1)
            lo = np.minimum(ring, nxt).ravel()
            hi = np.maximum(ring, nxt).ravel()
            ids = board.edge_ids(lo, hi).reshape(len(subs), k)
            ids.sort(axis=1)
            chunks.append(ids)
            counts += len(subs)
    flat = np.concatenate([c.ravel() for c in chunks])
    sizes = np.concatenate([np.full(len(c), c.shape[1], dtype=np.int64)
                            for c in chunks])
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    label = f"cycles(n={n},m={m}" + (f",max={top}" if top < n else "") + ")"
    return SetFamily._from_flat(board, flat, offsets, label=label)


def path_count_complete(n: int) -> int:
    """Number of non-trivial unordered simple paths of K_n, closed form."""
    return sum(comb(n, s) * factorial(s) // 2 for s in range(2, n + 1))


def _all_paths_of_complete(n: int, board: Board) -> list[tuple]:
    """Edge-id sets of all non-trivial unordered paths of K_n."""
    out = []
    for s in range(2, n + 1):
        for sub in itertools.combinations(range(n), s):
            for seq in itertools.permutations(sub):
                # dedupe reversal: keep the orientation with smaller first end
                if seq[0] > seq[-1]:
                    continue
                out.append(tuple(sorted(
                    board.edge_id(a, b) for a, b in zip(seq, seq[1:]))))
    return out


def build_path_tuple_family(n: int, r: int, *,
                            budget: int = 1_200_000) -> SetFamily:
    """Multi-family of union edge sets of ordered r-tuples of non-trivial
    paths of K_n whose union is a tree.

    Each qualifying tuple contributes its union once, so a union reachable
    from several tuples appears with that multiplicity.
    """
    if r < 1:
        raise ParameterError("tuple length r must be >= 1")
    board = Board.complete_graph(n)
    # closed-form count first: the path list itself can be enormous
    total = path_count_complete(n)
    if total ** r > budget:
        raise BudgetExceededError(
            f"{total}^{r} tuples exceed the budget {budget}")
    paths = _all_paths_of_complete(n, board)
    assert len(paths) == total
    pair_of = {}
    sets = []
    for combo in itertools.product(paths, repeat=r):
        union = set().union(*combo)
        verts = set()
        for eid in union:
            if eid not in pair_of:
                pair_of[eid] = board.edge_pair(eid)
            verts.update(pair_of[eid])
        if len(union) != len(verts) - 1:
            continue  # a union with a cycle is not a tree
        parent = {v: v for v in verts}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        joined = 0
        for eid in union:
            a, b = pair_of[eid]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
                joined += 1
        if joined == len(verts) - 1:
            sets.append(tuple(sorted(union)))
    return SetFamily(board, sets, label=f"path_tuples(n={n},r={r})")


def build_labeled_path_family(n: int, *, budget: int = 1_200_000) -> SetFamily:
    """Directed non-trivial paths of K_n: every unordered path counts twice."""
    board = Board.complete_graph(n)
    paths = _all_paths_of_complete(n, board)
    if 2 * len(paths) > budget:
        raise BudgetExceededError("labeled path family exceeds budget")
    return SetFamily(board, [p for p in paths for _ in range(2)],
                     label=f"labeled_paths(n={n})")
