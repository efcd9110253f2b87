"""Boards: the finite element sets that offer-and-claim games are played on.

A board is either the edge set of a complete graph K_n or an abstract set of
elements with no structure.  Elements are addressed by integer ids
``0 .. size-1``.  For K_n the id of the edge {u, v} with u < v is

    id(u, v) = v * (v - 1) / 2 + u

i.e. edges are ordered colexicographically: (0,1), (0,2), (1,2), (0,3), ...
This keeps ids for K_m a prefix of the ids for K_n when m < n.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np


@dataclass(frozen=True)
class Board:
    """An indexed element set, optionally structured as the edges of K_n.

    Attributes:
        size: number of elements on the board.
        n: vertex count when the board is the edge set of K_n, else None.
    """

    size: int
    n: int | None = None

    @staticmethod
    def complete_graph(n: int) -> "Board":
        if n < 2:
            raise ValueError(f"complete graph board needs n >= 2, got {n}")
        return Board(size=n * (n - 1) // 2, n=n)

    @staticmethod
    def abstract(size: int) -> "Board":
        if size < 1:
            raise ValueError(f"abstract board needs at least one element, got {size}")
        return Board(size=size, n=None)

    @property
    def is_graph(self) -> bool:
        return self.n is not None

    def edge_id(self, u: int, v: int) -> int:
        """Id of the K_n edge {u, v}."""
        if u == v:
            raise ValueError(f"no loop edges: ({u}, {v})")
        if u > v:
            u, v = v, u
        if u < 0 or v >= (self.n or 0):
            raise ValueError(f"edge ({u}, {v}) outside K_{self.n}")
        return v * (v - 1) // 2 + u

    def edge_pair(self, eid: int) -> tuple[int, int]:
        """Endpoints (u, v), u < v, of the edge with the given id."""
        if not 0 <= eid < self.size:
            raise ValueError(f"element id {eid} outside board of size {self.size}")
        v = (1 + isqrt(8 * eid + 1)) // 2
        u = eid - v * (v - 1) // 2
        return u, v

    def edge_ids(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Vectorized edge_id; both arrays must already satisfy us < vs."""
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        return vs * (vs - 1) // 2 + us

    def edge_pairs(self, eids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized edge_pair; returns (us, vs) with us < vs."""
        eids = np.asarray(eids, dtype=np.int64)
        vs = ((1.0 + np.sqrt(8.0 * eids + 1.0)) // 2).astype(np.int64)
        # float sqrt can land one off near triangular numbers; correct both ways
        tri = vs * (vs - 1) // 2
        too_big = tri > eids
        vs[too_big] -= 1
        tri = vs * (vs - 1) // 2
        too_small = eids - tri >= vs
        vs[too_small] += 1
        us = eids - vs * (vs - 1) // 2
        return us, vs

    def star_ids(self, center: int, leaves: np.ndarray) -> np.ndarray:
        """Vectorized ids of all edges {center, leaf}."""
        leaves = np.asarray(leaves, dtype=np.int64)
        lo = np.minimum(leaves, center)
        hi = np.maximum(leaves, center)
        return hi * (hi - 1) // 2 + lo

    def describe(self) -> list:
        """Canonical short form used in transcripts."""
        if self.is_graph:
            return ["K_n", self.n]
        return ["abstract", self.size]

    @staticmethod
    def from_description(desc: list) -> "Board":
        kind, value = desc
        if kind == "K_n":
            return Board.complete_graph(int(value))
        if kind == "abstract":
            return Board.abstract(int(value))
        raise ValueError(f"unknown board kind {kind!r}")
