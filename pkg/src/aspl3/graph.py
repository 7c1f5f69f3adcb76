"""Simple undirected graphs with dense integer node ids.

Adjacency is kept in CSR form (``indptr``/``indices``) next to an indexable
edge array.  Switch moves never change degrees, so the optimizers rewrite
``indices`` and ``edges`` in place from compiled kernels.  A slot holding
``HOLE`` (-1) is an unused adjacency position; it only appears transiently
while a switch is half applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from numba import njit

from .errors import EdgeListParseError, FeasibilityError, GraphError

HOLE = -1
UNREACHABLE = -1


class Graph:
    """Mutable simple undirected graph on nodes ``0..n-1``.

    ``degree`` is the common degree when the graph is regular and ``None``
    otherwise.  Generators and optimizers only produce regular graphs, but
    the motif counters and file readers accept any simple graph.
    """

    def __init__(self, n: int, edges, degree: int | None = None):
        n = int(n)
        if n < 1:
            raise GraphError(f"order must be positive, got {n}")
        edges = np.asarray(edges, dtype=np.int32).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise GraphError(f"edge endpoint outside 0..{n - 1}")
        if np.any(edges[:, 0] == edges[:, 1]):
            u = int(edges[edges[:, 0] == edges[:, 1]][0, 0])
            raise GraphError(f"self-loop at node {u}")
        lo = np.minimum(edges[:, 0], edges[:, 1]).astype(np.int64)
        hi = np.maximum(edges[:, 0], edges[:, 1]).astype(np.int64)
        keys = lo * n + hi
        uniq, counts = np.unique(keys, return_counts=True)
        if np.any(counts > 1):
            k = int(uniq[counts > 1][0])
            raise GraphError(f"duplicate edge {{{k // n}, {k % n}}}")

        self.n = n
        self.edges = np.ascontiguousarray(edges)
        deg = np.bincount(edges.ravel(), minlength=n).astype(np.int64)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=self.indptr[1:])
        self.indices = np.empty(int(self.indptr[-1]), dtype=np.int32)
        _fill_csr(self.indptr, self.edges, self.indices)

        regular = bool(n > 0 and np.all(deg == deg[0]))
        if degree is not None:
            if not regular or int(deg[0]) != degree:
                bad = int(np.flatnonzero(deg != degree)[0])
                raise GraphError(f"node {bad} has degree {int(deg[bad])}, expected {degree}")
        self.degree = int(deg[0]) if regular else None
        self._index: dict[int, int] | None = None

    # construction helpers

    @classmethod
    def from_edge_list(cls, edges, n: int | None = None, degree: int | None = None) -> "Graph":
        edges = np.asarray(list(edges), dtype=np.int32).reshape(-1, 2)
        if n is None:
            n = int(edges.max()) + 1 if edges.size else 0
        return cls(n, edges, degree=degree)

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g.n = self.n
        g.degree = self.degree
        g.edges = self.edges.copy()
        g.indptr = self.indptr.copy()
        g.indices = self.indices.copy()
        g._index = None
        return g

    # queries

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_regular(self) -> bool:
        return self.degree is not None

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        row = self.indices[self.indptr[v]:self.indptr[v + 1]]
        return row[row != HOLE]

    def _key(self, u: int, v: int) -> int:
        return min(u, v) * self.n + max(u, v)

    def _edge_map(self) -> dict[int, int]:
        if self._index is None:
            lo = np.minimum(self.edges[:, 0], self.edges[:, 1]).astype(np.int64)
            hi = np.maximum(self.edges[:, 0], self.edges[:, 1]).astype(np.int64)
            self._index = dict(zip((lo * self.n + hi).tolist(), range(self.m)))
        return self._index

    def has_edge(self, u: int, v: int) -> bool:
        return self._key(int(u), int(v)) in self._edge_map()

    def edge_index(self, u: int, v: int) -> int:
        try:
            return self._edge_map()[self._key(int(u), int(v))]
        except KeyError:
            raise GraphError(f"no edge {{{u}, {v}}}") from None

    def edge_set(self) -> set[tuple[int, int]]:
        return {(min(u, v), max(u, v)) for u, v in self.edges.tolist()}

    def invalidate(self) -> None:
        """Drop cached membership after ``edges``/``indices`` were rewritten in place."""
        self._index = None

    def check(self) -> None:
        """Raise ``GraphError`` unless adjacency, edge list and degree agree."""
        if np.any(self.indices == HOLE):
            raise GraphError("adjacency has unfilled slots")
        if self.degree is not None and np.any(self.degrees() != self.degree):
            raise GraphError("degree changed")
        rebuilt = Graph(self.n, self.edges)
        for v in range(self.n):
            if not np.array_equal(np.sort(self.neighbors(v)), np.sort(rebuilt.neighbors(v))):
                raise GraphError(f"adjacency of node {v} disagrees with edge list")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edge_set() == other.edge_set()

    __hash__ = None

    def __repr__(self) -> str:
        d = self.degree if self.degree is not None else "irregular"
        return f"Graph(n={self.n}, m={self.m}, degree={d})"


@njit(cache=True)
def _fill_csr(indptr, edges, indices):
    pos = indptr[:-1].copy()
    for e in range(edges.shape[0]):
        u = edges[e, 0]
        v = edges[e, 1]
        indices[pos[u]] = v
        pos[u] += 1
        indices[pos[v]] = u
        pos[v] += 1


@njit(cache=True)
def _slot(indptr, indices, u, v):
    for p in range(indptr[u], indptr[u + 1]):
        if indices[p] == v:
            return p
    return -1


@njit(cache=True, nogil=True)
def _switch_graph(indptr, indices, edges, i1, i2, a, b, c, d):
    # ab, cd -> ac, bd; every endpoint keeps its degree
    indices[_slot(indptr, indices, a, b)] = c
    indices[_slot(indptr, indices, b, a)] = d
    indices[_slot(indptr, indices, c, d)] = a
    indices[_slot(indptr, indices, d, c)] = b
    edges[i1, 0] = a
    edges[i1, 1] = c
    edges[i2, 0] = b
    edges[i2, 1] = d


@njit(cache=True)
def _is_adjacent(indptr, indices, u, v):
    # rows are short (length d); scanning the smaller one is enough
    if indptr[u + 1] - indptr[u] > indptr[v + 1] - indptr[v]:
        u, v = v, u
    for p in range(indptr[u], indptr[u + 1]):
        if indices[p] == v:
            return True
    return False


# generation


def check_feasible(n: int, d: int) -> None:
    if d < 2 or n <= d:
        raise FeasibilityError(f"need n > d >= 2, got n={n}, d={d}")
    if (n * d) % 2:
        raise FeasibilityError(f"n*d must be even, got n={n}, d={d}")


def new_base_regular(n: int, d: int) -> Graph:
    """Circulant d-regular graph: i ~ i±1..i±d//2, plus i ~ i+n/2 when d is odd."""
    check_feasible(n, d)
    nodes = np.arange(n, dtype=np.int64)
    parts = [np.stack([nodes, (nodes + k) % n], axis=1) for k in range(1, d // 2 + 1)]
    # interleave so edges are listed node by node
    edges = np.stack(parts, axis=1).reshape(-1, 2) if parts else np.empty((0, 2), np.int64)
    if d % 2:
        half = nodes[: n // 2]
        edges = np.concatenate([edges, np.stack([half, half + n // 2], axis=1)])
    return Graph(n, edges, degree=d)


def randomize(g: Graph, rounds: int | None = None, seed=None, max_tries: int = 10_000) -> Graph:
    """Return a copy of ``g`` after ``rounds`` uniformly random valid switches.

    ``rounds`` defaults to ``10 * |E|``.  A graph without any valid switch
    (e.g. K4) comes back unchanged.
    """
    from .search import _random_switches

    out = g.copy()
    if rounds is None:
        rounds = 10 * g.m
    if rounds <= 0 or g.m < 2:
        return out
    rng = np.random.default_rng(seed)
    _random_switches(out.indptr, out.indices, out.edges, int(rounds), rng, int(max_tries))
    out.invalidate()
    return out


def random_regular(n: int, d: int, seed=None, rounds: int | None = None) -> Graph:
    return randomize(new_base_regular(n, d), rounds=rounds, seed=seed)


# distances


def _distance_dtype(n: int):
    for dt in (np.int8, np.int16, np.int32):
        if n <= np.iinfo(dt).max:
            return dt
    return np.int64


@njit(cache=True, nogil=True)
def _bfs(indptr, indices, source, dist, queue):
    dist[:] = -1
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if v >= 0 and dist[v] < 0:
                dist[v] = du
                queue[tail] = v
                tail += 1
    return tail


@njit(cache=True, nogil=True)
def _distance_histogram(indptr, indices, n, dist, queue):
    hist = np.zeros(n + 1, dtype=np.int64)
    unreachable = 0
    for s in range(n):
        reached = _bfs(indptr, indices, s, dist, queue)
        unreachable += n - reached
        for i in range(reached):
            hist[dist[queue[i]]] += 1
    return hist, unreachable


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances from ``source``; ``UNREACHABLE`` (-1) marks other components."""
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} outside 0..{g.n - 1}")
    dist = np.empty(g.n, dtype=_distance_dtype(g.n))
    queue = np.empty(g.n, dtype=np.int64)
    _bfs(g.indptr, g.indices, int(source), dist, queue)
    return dist


@dataclass(frozen=True)
class DistanceSummary:
    n: int
    n1: int
    n2: int
    n3: int
    unreachable_or_farther: int
    distance_sum: int
    connected: bool
    diameter: int | float  # math.inf when disconnected

    @property
    def pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def aspl(self) -> Fraction | float:
        if not self.connected:
            return math.inf
        if self.pairs == 0:
            return Fraction(0)
        return Fraction(self.distance_sum, self.pairs)


def distance_summary(g: Graph) -> DistanceSummary:
    """All-pairs BFS, reduced to counts per distance and an exact ASPL."""
    dist = np.empty(g.n, dtype=_distance_dtype(g.n))
    queue = np.empty(g.n, dtype=np.int64)
    hist, unreachable = _distance_histogram(g.indptr, g.indices, g.n, dist, queue)
    # every unordered pair was seen from both ends
    hist //= 2
    unreachable //= 2
    ks = np.nonzero(hist[1:])[0] + 1
    diameter = int(ks.max()) if len(ks) else 0
    connected = unreachable == 0
    dsum = sum(int(k) * int(hist[k]) for k in ks)
    return DistanceSummary(
        n=g.n,
        n1=int(hist[1]),
        n2=int(hist[2]) if g.n > 2 else 0,
        n3=int(hist[3]) if g.n > 3 else 0,
        unreachable_or_farther=int(hist[4:].sum()) + int(unreachable),
        distance_sum=dsum,
        connected=bool(connected),
        diameter=diameter if connected else math.inf,
    )


# edge-list files


def parse_edge_list(text: str, path: str | None = None, n: int | None = None) -> Graph:
    """Parse "u v" lines (0-based, each undirected edge once).

    Blank lines and lines starting with ``#`` are skipped.  Errors name the
    offending line.
    """
    edges = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(f"expected two node ids, got {line!r}", lineno, path)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(f"non-integer node id in {line!r}", lineno, path) from None
        if u < 0 or v < 0:
            raise EdgeListParseError(f"negative node id in {line!r}", lineno, path)
        if u == v:
            raise EdgeListParseError(f"self-loop at node {u}", lineno, path)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise EdgeListParseError(
                f"duplicate edge {key[0]} {key[1]} (first on line {seen[key]})", lineno, path
            )
        seen[key] = lineno
        edges.append((u, v))
    if not edges:
        raise EdgeListParseError("no edges", None, path)
    order = max(max(e) for e in edges) + 1
    if n is not None:
        if n < order:
            raise EdgeListParseError(f"node id {order - 1} exceeds declared order {n}", None, path)
        order = n
    return Graph(order, edges)


def read_edge_list(path, n: int | None = None) -> Graph:
    path = Path(path)
    return parse_edge_list(path.read_text(), path=str(path), n=n)


def format_edge_list(g: Graph) -> str:
    return "".join(f"{min(u, v)} {max(u, v)}\n" for u, v in g.edges.tolist())


def write_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g))
