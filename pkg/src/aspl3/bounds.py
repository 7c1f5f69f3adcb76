"""Motif counts, inclusion-exclusion terms T(m) and ASPL bounds for diameter 3.

Everything here is derived from one histogram: for each unordered node
pair {i, j} let c_ij be the number of common neighbours.  Counting pairs by
(c_ij, adjacent?) is O(n d^2) and keeps O(n) memory, and every motif count
and T(m) follows from it with exact Python integers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit

from .errors import DiameterMismatch
from .graph import DistanceSummary, Graph, distance_summary


@njit(cache=True, nogil=True)
def _common_neighbor_histogram(indptr, indices, n, max_deg):
    # hist[a, c]: pairs i<j with c common neighbours, a = 1 if adjacent
    hist = np.zeros((2, max_deg + 1), dtype=np.int64)
    cnt = np.zeros(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.int8)
    touched = np.empty(n, dtype=np.int64)
    for i in range(n):
        ntouched = 0
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j >= 0:
                mark[j] = 1
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j < 0:
                continue
            for q in range(indptr[j], indptr[j + 1]):
                k = indices[q]
                if k <= i:
                    continue
                if cnt[k] == 0:
                    touched[ntouched] = k
                    ntouched += 1
                cnt[k] += 1
        for t in range(ntouched):
            k = touched[t]
            hist[mark[k], cnt[k]] += 1
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j > i and cnt[j] == 0:
                hist[1, 0] += 1
        for t in range(ntouched):
            cnt[touched[t]] = 0
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if j >= 0:
                mark[j] = 0
    return hist


@dataclass(frozen=True)
class CommonNeighborHistogram:
    """Pair counts keyed by common-neighbour count, split by adjacency.

    Pairs that are neither adjacent nor share a neighbour are not stored;
    they contribute nothing to any count below.
    """

    nonadjacent: tuple[int, ...]
    adjacent: tuple[int, ...]

    @classmethod
    def of(cls, g: Graph) -> "CommonNeighborHistogram":
        max_deg = int(g.degrees().max()) if g.n else 0
        h = _common_neighbor_histogram(g.indptr, g.indices, g.n, max_deg)
        return cls(tuple(int(x) for x in h[0]), tuple(int(x) for x in h[1]))

    @property
    def max_common(self) -> int:
        for c in range(len(self.adjacent) - 1, -1, -1):
            if self.adjacent[c] or self.nonadjacent[c]:
                return c
        return 0

    def _pairs(self):
        for c, (h0, h1) in enumerate(zip(self.nonadjacent, self.adjacent)):
            if h0 or h1:
                yield c, h0, h1

    def triangles(self) -> int:
        # every triangle is seen from each of its three edges
        return sum(c * h1 for c, _, h1 in self._pairs()) // 3

    def squares(self) -> int:
        # every 4-cycle is seen from each of its two diagonals
        return sum(math.comb(c, 2) * (h0 + h1) for c, h0, h1 in self._pairs()) // 2

    def k_triangles(self, k: int) -> int:
        if k < 0:
            raise ValueError("k must be >= 0")
        if k == 1:
            return self.triangles()
        return sum(math.comb(c, k) * h1 for c, _, h1 in self._pairs())

    def k_squares(self, k: int) -> int:
        if k < 0:
            raise ValueError("k must be >= 0")
        if k == 1:
            return self.squares()
        return sum(math.comb(c, k + 1) * (h0 + h1) for c, h0, h1 in self._pairs())

    def t(self, m: int) -> int:
        if m < 1:
            raise ValueError("m must be >= 1")
        return sum(
            (h0 + h1) * math.comb(c, m) + h1 * math.comb(c, m - 1) for c, h0, h1 in self._pairs()
        )

    @property
    def m_max(self) -> int:
        """Largest m with T(m) possibly nonzero."""
        return self.max_common + 1

    def alternating_sum(self, t: int | None = None) -> int:
        """sum_{m=1..t} (-1)^(m-1) T(m); the full series when ``t`` is None."""
        top = self.m_max if t is None else min(t, self.m_max)
        return sum((-1) ** (m - 1) * self.t(m) for m in range(1, top + 1))


@dataclass
class MotifCounts:
    triangles: int
    squares: int
    k_triangles: dict[int, int] = field(default_factory=dict)
    k_squares: dict[int, int] = field(default_factory=dict)


def motif_counts(g: Graph, ks=(2, 3, 4)) -> MotifCounts:
    h = CommonNeighborHistogram.of(g)
    return MotifCounts(
        triangles=h.triangles(),
        squares=h.squares(),
        k_triangles={k: h.k_triangles(k) for k in ks},
        k_squares={k: h.k_squares(k) for k in ks},
    )


def count_triangles(g: Graph) -> int:
    return CommonNeighborHistogram.of(g).triangles()


def count_squares(g: Graph) -> int:
    return CommonNeighborHistogram.of(g).squares()


def count_k_multiple(g: Graph, k: int) -> tuple[int, int]:
    """(k-multiple triangles, k-multiple squares)."""
    h = CommonNeighborHistogram.of(g)
    return h.k_triangles(k), h.k_squares(k)


def evaluation(g: Graph) -> int:
    """The search objective 3*triangles + 2*squares (equal to T(2))."""
    h = CommonNeighborHistogram.of(g)
    return 3 * h.triangles() + 2 * h.squares()


def t_of_m(g: Graph, m: int) -> int:
    return CommonNeighborHistogram.of(g).t(m)


# ASPL identities


def moore_bound(n: int, d: int) -> Fraction:
    if n < 2:
        raise ValueError("n must be >= 2")
    return 3 - Fraction(d * (d + 1), n - 1)


def aspl_gap(aspl, n: int, d: int):
    """(aspl - L) / L for the Moore bound L; exact when ``aspl`` is rational."""
    low = moore_bound(n, d)
    if isinstance(aspl, (int, Fraction)):
        return (Fraction(aspl) - low) / low
    return (float(aspl) - float(low)) / float(low)


def _truncated(n: int, m_edges: int, partial: int) -> Fraction:
    return 3 - Fraction(2 * (m_edges + partial), n * (n - 1))


def _require_diameter3(g: Graph, summary: DistanceSummary | None) -> DistanceSummary:
    if summary is None:
        summary = distance_summary(g)
    if summary.diameter != 3:
        raise DiameterMismatch(summary.diameter)
    return summary


def aspl_equality(
    g: Graph,
    hist: CommonNeighborHistogram | None = None,
    summary: DistanceSummary | None = None,
) -> Fraction:
    """Exact ASPL of a diameter-3 graph from the full inclusion-exclusion series."""
    _require_diameter3(g, summary)
    h = hist or CommonNeighborHistogram.of(g)
    return _truncated(g.n, g.m, h.alternating_sum())


@dataclass(frozen=True)
class Bound:
    value: Fraction
    direction: str  # "upper" or "lower"; valid only for diameter-3 graphs

    def __float__(self) -> float:
        return float(self.value)


def aspl_bound(g: Graph, t: int, hist: CommonNeighborHistogram | None = None) -> Bound:
    """Series truncated after T(t): an upper bound for even t, lower for odd t."""
    if t < 1:
        raise ValueError("truncation order must be >= 1")
    h = hist or CommonNeighborHistogram.of(g)
    return Bound(_truncated(g.n, g.m, h.alternating_sum(t)), "upper" if t % 2 == 0 else "lower")


def _fmt(x) -> float | str | None:
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return float(x)


@dataclass
class BoundsReport:
    n: int
    d: int | None
    m: int
    t_values: dict[int, int]
    bounds: dict[int, Bound]
    moore: Fraction | None
    aspl: Fraction | float | None
    diameter: int | float | None
    equality_aspl: Fraction | None

    @property
    def diameter_verified(self) -> bool:
        return self.diameter == 3

    @property
    def aspl_gap(self):
        if self.moore is None or self.aspl is None or self.d is None:
            return None
        return aspl_gap(self.aspl, self.n, self.d)

    def relative_errors(self) -> dict[int, Fraction]:
        if not isinstance(self.aspl, Fraction):
            return {}
        return {t: (b.value - self.aspl) / self.aspl for t, b in self.bounds.items()}

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "d": self.d,
            "edges": self.m,
            "t_values": {str(m): v for m, v in self.t_values.items()},
            "equality_aspl": _fmt(self.equality_aspl),
            "bounds": {
                str(t): {"value": float(b.value), "direction": b.direction, "exact": str(b.value)}
                for t, b in self.bounds.items()
            },
            "moore": _fmt(self.moore),
            "aspl": _fmt(self.aspl),
            "aspl_gap": _fmt(self.aspl_gap),
            "diameter": _fmt(self.diameter) if isinstance(self.diameter, float) else self.diameter,
            "diameter_verified": self.diameter_verified,
            "relative_errors": {str(t): float(e) for t, e in self.relative_errors().items()},
        }
        if self.equality_aspl is not None:
            out["equality_aspl_exact"] = str(self.equality_aspl)
        if not self.diameter_verified:
            out["note"] = "graph diameter is not 3; equality and bounds do not apply"
        if self.d is None:
            out["note_regular"] = "graph is not regular; Moore bound and gap omitted"
        return out


def bounds_report(g: Graph, t_max: int = 3, summary: DistanceSummary | None = None) -> BoundsReport:
    if summary is None:
        summary = distance_summary(g)
    h = CommonNeighborHistogram.of(g)
    ok = summary.diameter == 3
    return BoundsReport(
        n=g.n,
        d=g.degree,
        m=g.m,
        t_values={m: h.t(m) for m in range(1, t_max + 1)},
        bounds={t: aspl_bound(g, t, h) for t in range(1, t_max + 1)},
        moore=moore_bound(g.n, g.degree) if g.degree is not None and g.n >= 2 else None,
        aspl=summary.aspl,
        diameter=summary.diameter,
        equality_aspl=aspl_equality(g, h, summary) if ok else None,
    )


# brute-force oracles

BRUTE_FORCE_CAP = 64


def _adjacency_sets(g: Graph) -> list[set[int]]:
    return [set(g.neighbors(v).tolist()) for v in range(g.n)]


def _count_structures(adj, n: int, size: int, with_edge: bool) -> int:
    # Number of distinct subgraphs on ``size`` nodes made of a pair {i, j}
    # joined through every other node of the subset (plus the edge ij when
    # ``with_edge``).  Subgraphs are compared by edge set, so a structure
    # reachable from several pairs is counted once.
    total = 0
    for nodes in itertools.combinations(range(n), size):
        found = set()
        for i, j in itertools.combinations(nodes, 2):
            if with_edge and j not in adj[i]:
                continue
            rest = [v for v in nodes if v != i and v != j]
            if all(v in adj[i] and v in adj[j] for v in rest):
                es = {frozenset((i, v)) for v in rest} | {frozenset((v, j)) for v in rest}
                if with_edge:
                    es.add(frozenset((i, j)))
                found.add(frozenset(es))
        total += len(found)
    return total


def brute_force_motifs(g: Graph, ks=(2, 3, 4), cap: int = BRUTE_FORCE_CAP) -> MotifCounts:
    """Count motifs by enumerating node subsets; exponential, for tests only."""
    if g.n > cap:
        raise ValueError(f"brute-force motif count limited to n <= {cap}, got {g.n}")
    adj = _adjacency_sets(g)
    return MotifCounts(
        triangles=_count_structures(adj, g.n, 3, True),
        squares=_count_structures(adj, g.n, 4, False),
        k_triangles={k: _count_structures(adj, g.n, k + 2, True) for k in ks},
        k_squares={k: _count_structures(adj, g.n, k + 3, False) for k in ks},
    )


def t_of_m_by_subsets(g: Graph, m: int, cap: int = 12) -> int:
    """T(m) straight from its definition: witness subsets of size m per pair."""
    if g.n > cap:
        raise ValueError(f"subset enumeration limited to n <= {cap}")
    adj = _adjacency_sets(g)
    total = 0
    for i, j in itertools.combinations(range(g.n), 2):
        # None stands for the direct-edge witness, a node k for the path i-k-j
        witnesses = [None] + [k for k in range(g.n) if k != i and k != j]
        for subset in itertools.combinations(witnesses, m):
            if all(j in adj[i] if k is None else (k in adj[i] and k in adj[j]) for k in subset):
                total += 1
    return total
