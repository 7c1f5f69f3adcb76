"""Path-count tables and O(1) switch evaluation of g = 3*triangles + 2*squares.

For the current graph the three n x n tables hold

* ``t1[i, j]`` -- 1 if {i, j} is an edge,
* ``t2[i, j]`` -- number of i-j paths of length 2 (common neighbours),
* ``t3[i, j]`` -- number of i-j simple paths of length 3.

Diagonals of ``t2``/``t3`` are never maintained and never read.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import TableSizeError
from .graph import HOLE, Graph, _slot

DEFAULT_MAX_BYTES = 2 * 1024**3


@dataclass
class PathTables:
    t1: np.ndarray
    t2: np.ndarray
    t3: np.ndarray

    @property
    def n(self) -> int:
        return self.t1.shape[0]

    def copy(self) -> "PathTables":
        return PathTables(self.t1.copy(), self.t2.copy(), self.t3.copy())

    def edge_key(self, a: int, b: int) -> int:
        """3 * (triangles through edge ab) + 2 * (squares through edge ab)."""
        return 3 * int(self.t2[a, b]) + 2 * int(self.t3[a, b])

    def equals(self, other: "PathTables") -> bool:
        """Entry-wise equality, ignoring the unmaintained diagonals."""
        off = ~np.eye(self.n, dtype=bool)
        return (
            np.array_equal(self.t1, other.t1)
            and np.array_equal(self.t2[off], other.t2[off])
            and np.array_equal(self.t3[off], other.t3[off])
        )


@dataclass(frozen=True)
class SwitchDelta:
    d_triangle: int
    d_square: int

    @property
    def d_g(self) -> int:
        return 3 * self.d_triangle + 2 * self.d_square


@njit(cache=True, nogil=True)
def _build(indptr, indices, n, t1, t2, t3):
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j < 0:
                continue
            t1[i, j] = 1
            for q in range(indptr[j], indptr[j + 1]):
                k = indices[q]
                if k < 0 or k == i:
                    continue
                t2[i, k] += 1
                for r in range(indptr[k], indptr[k + 1]):
                    l = indices[r]
                    if l < 0 or l == j or l == i:
                        continue
                    t3[i, l] += 1


def table_bytes(n: int) -> int:
    return 3 * n * n * np.dtype(np.int32).itemsize


def build(g: Graph, max_bytes: int = DEFAULT_MAX_BYTES) -> PathTables:
    """Build all three tables by enumerating every simple path of length <= 3."""
    need = table_bytes(g.n)
    if need > max_bytes:
        raise TableSizeError(
            f"path tables for n={g.n} need {need / 2**30:.2f} GiB, cap is {max_bytes / 2**30:.2f} GiB"
        )
    t1 = np.zeros((g.n, g.n), dtype=np.int32)
    t2 = np.zeros_like(t1)
    t3 = np.zeros_like(t1)
    _build(g.indptr, g.indices, g.n, t1, t2, t3)
    return PathTables(t1, t2, t3)


@njit(cache=True, nogil=True)
def _delta(t1, t2, t3, a, b, c, d):
    # ab, cd removed; ac, bd added
    d_tri = -t2[a, b] - t2[c, d] + t2[a, c] + t2[b, d] - 2 * (t1[a, d] + t1[b, c])
    d_sq = (
        -t3[a, b] - t3[c, d] + t3[a, c] + t3[b, d]
        - 2 * (t2[a, d] + t2[b, c] - t1[a, d] * t1[b, c])
    )
    return d_tri, d_sq


@njit(cache=True, nogil=True)
def _delta_g(t1, t2, t3, a, b, c, d):
    d_tri, d_sq = _delta(t1, t2, t3, a, b, c, d)
    return 3 * d_tri + 2 * d_sq


@njit(cache=True, nogil=True)
def _paths_through(indptr, indices, t2, t3, u, v, s):
    # Adds s to every t2/t3 entry for a path that uses edge uv.  The edge
    # itself is skipped during enumeration, so this works whether or not uv
    # is currently present in the adjacency.
    for p in range(indptr[u], indptr[u + 1]):
        x = indices[p]
        if x < 0 or x == v:
            continue
        # x-u-v
        t2[x, v] += s
        t2[v, x] += s
        for q in range(indptr[v], indptr[v + 1]):
            y = indices[q]
            if y < 0 or y == u or y == x:
                continue
            # x-u-v-y
            t3[x, y] += s
            t3[y, x] += s
        for q in range(indptr[x], indptr[x + 1]):
            w = indices[q]
            if w < 0 or w == u or w == v:
                continue
            # v-u-x-w
            t3[v, w] += s
            t3[w, v] += s
    for p in range(indptr[v], indptr[v + 1]):
        y = indices[p]
        if y < 0 or y == u:
            continue
        # u-v-y
        t2[u, y] += s
        t2[y, u] += s
        for q in range(indptr[y], indptr[y + 1]):
            z = indices[q]
            if z < 0 or z == v or z == u:
                continue
            # u-v-y-z
            t3[u, z] += s
            t3[z, u] += s


@njit(cache=True, nogil=True)
def _remove_edge(indptr, indices, t1, t2, t3, u, v):
    indices[_slot(indptr, indices, u, v)] = HOLE
    indices[_slot(indptr, indices, v, u)] = HOLE
    t1[u, v] = 0
    t1[v, u] = 0
    _paths_through(indptr, indices, t2, t3, u, v, -1)


@njit(cache=True, nogil=True)
def _add_edge(indptr, indices, t1, t2, t3, u, v):
    # needs a free slot in both rows, i.e. an earlier removal at u and v
    indices[_slot(indptr, indices, u, HOLE)] = v
    indices[_slot(indptr, indices, v, HOLE)] = u
    t1[u, v] = 1
    t1[v, u] = 1
    _paths_through(indptr, indices, t2, t3, u, v, 1)


@njit(cache=True, nogil=True)
def _apply(indptr, indices, edges, t1, t2, t3, i1, i2, a, b, c, d):
    _remove_edge(indptr, indices, t1, t2, t3, a, b)
    _remove_edge(indptr, indices, t1, t2, t3, c, d)
    _add_edge(indptr, indices, t1, t2, t3, a, c)
    _add_edge(indptr, indices, t1, t2, t3, b, d)
    edges[i1, 0] = a
    edges[i1, 1] = c
    edges[i2, 0] = b
    edges[i2, 1] = d


def delta_eval(t: PathTables, move) -> SwitchDelta:
    """Change of (triangles, squares) if ``move`` were applied; tables untouched."""
    a, b, c, d = move.nodes
    if __debug__:
        assert len({a, b, c, d}) == 4, "switch endpoints must be distinct"
        assert t.t1[a, b] and t.t1[c, d], "removed edges must exist"
        assert not t.t1[a, c] and not t.t1[b, d], "added edges must be absent"
    d_tri, d_sq = _delta(t.t1, t.t2, t.t3, a, b, c, d)
    return SwitchDelta(int(d_tri), int(d_sq))


def apply_switch(t: PathTables, g: Graph, move) -> None:
    """Apply ``move`` to ``g`` and update ``t`` in place (O(d^2))."""
    a, b, c, d = move.nodes
    i1, i2 = move.edge_ids(g)
    if __debug__:
        assert len({a, b, c, d}) == 4
        assert t.t1[a, b] and t.t1[c, d] and not t.t1[a, c] and not t.t1[b, d]
    _apply(g.indptr, g.indices, g.edges, t.t1, t.t2, t.t3, i1, i2, a, b, c, d)
    g.invalidate()
