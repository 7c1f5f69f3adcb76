"""Switch moves and the two local-search optimizers (first improvement, annealing).

Both optimizers keep the graph and its path tables in compiled kernels and
return to Python every ``chunk`` evaluations to check budgets, log progress
and run optional self-checks.  Between chunks the whole run state lives in
small arrays, so a run can be paused, inspected or moved to another thread.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit

from . import bounds
from .errors import InvariantViolation, SaturatedGraphError
from .graph import Graph, _is_adjacent, _switch_graph, distance_summary
from .tables import PathTables, _apply, _delta_g, build

log = logging.getLogger(__name__)

DEFAULT_MAX_TRIES = 10_000


@dataclass(frozen=True)
class SwitchMove:
    """Remove edges {a,b}, {c,d}; add {a,c}, {b,d}.

    The other rewiring of the same edge pair, {a,d} + {b,c}, is the move
    ``SwitchMove(a, b, d, c)``.  ``i_ab``/``i_cd`` are optional positions of
    the removed edges in ``Graph.edges``.
    """

    a: int
    b: int
    c: int
    d: int
    i_ab: int | None = None
    i_cd: int | None = None

    @property
    def nodes(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    @property
    def removed(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.a, self.b), (self.c, self.d)

    @property
    def added(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.a, self.c), (self.b, self.d)

    def inverse(self) -> "SwitchMove":
        return SwitchMove(self.a, self.c, self.b, self.d, self.i_ab, self.i_cd)

    def edge_ids(self, g: Graph) -> tuple[int, int]:
        i1 = self.i_ab if self.i_ab is not None else g.edge_index(self.a, self.b)
        i2 = self.i_cd if self.i_cd is not None else g.edge_index(self.c, self.d)
        return i1, i2


def validate(g: Graph, move: SwitchMove) -> bool:
    a, b, c, d = move.nodes
    if len({a, b, c, d}) != 4:
        return False
    return g.has_edge(a, b) and g.has_edge(c, d) and not g.has_edge(a, c) and not g.has_edge(b, d)


def apply_move(g: Graph, move: SwitchMove) -> None:
    """Rewire ``g`` in place without touching any tables."""
    i1, i2 = move.edge_ids(g)
    _switch_graph(g.indptr, g.indices, g.edges, i1, i2, *move.nodes)
    g.invalidate()


# proposal


@njit(cache=True, nogil=True)
def _pick(edges, rng):
    # floor(U * m) instead of rng.integers, which is slow under numba;
    # the bias is at most m / 2**53
    m = edges.shape[0]
    i1 = min(int(rng.random() * m), m - 1)
    i2 = min(int(rng.random() * (m - 1)), m - 2)
    if i2 >= i1:
        i2 += 1
    a = edges[i1, 0]
    b = edges[i1, 1]
    c = edges[i2, 0]
    d = edges[i2, 1]
    if rng.random() < 0.5:
        c, d = d, c
    return i1, i2, a, b, c, d


@njit(cache=True, nogil=True)
def _propose(indptr, indices, edges, rng, max_tries):
    for _ in range(max_tries):
        i1, i2, a, b, c, d = _pick(edges, rng)
        if a == c or a == d or b == c or b == d:
            continue
        if _is_adjacent(indptr, indices, a, c) or _is_adjacent(indptr, indices, b, d):
            continue
        return i1, i2, a, b, c, d
    return -1, -1, -1, -1, -1, -1


@njit(cache=True, nogil=True)
def _propose_t1(t1, edges, rng, max_tries):
    for _ in range(max_tries):
        i1, i2, a, b, c, d = _pick(edges, rng)
        if a == c or a == d or b == c or b == d:
            continue
        if t1[a, c] or t1[b, d]:
            continue
        return i1, i2, a, b, c, d
    return -1, -1, -1, -1, -1, -1


@njit(cache=True, nogil=True)
def _random_switches(indptr, indices, edges, rounds, rng, max_tries):
    for r in range(rounds):
        i1, i2, a, b, c, d = _propose(indptr, indices, edges, rng, max_tries)
        if i1 < 0:
            return r
        _switch_graph(indptr, indices, edges, i1, i2, a, b, c, d)
    return rounds


def propose_switch(g: Graph, rng: np.random.Generator, max_tries: int = DEFAULT_MAX_TRIES) -> SwitchMove:
    """Uniform edge pair and rewiring direction, resampled until valid."""
    if g.m < 2:
        raise SaturatedGraphError("need at least two edges")
    i1, i2, a, b, c, d = _propose(g.indptr, g.indices, g.edges, rng, max_tries)
    if i1 < 0:
        raise SaturatedGraphError(f"no valid switch found in {max_tries} samples")
    return SwitchMove(int(a), int(b), int(c), int(d), int(i1), int(i2))


# annealing acceptance


@njit(cache=True, nogil=True)
def _accept(delta_g, temperature, rng):
    if delta_g <= 0:
        return True
    return rng.random() < math.exp(-delta_g / temperature)


@njit(cache=True, nogil=True)
def _acceptance_trials(delta_g, temperature, rng, trials):
    hits = 0
    for _ in range(trials):
        if _accept(delta_g, temperature, rng):
            hits += 1
    return hits


def sa_acceptance(delta_g: int, temperature: float, rng: np.random.Generator) -> bool:
    """Metropolis rule: always take non-worsening moves, else with exp(-delta/T)."""
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    return bool(_accept(int(delta_g), float(temperature), rng))


def temperature(k: int, c: float = 11.0) -> float:
    """Schedule c / ln(k + 1); k counts evaluated neighbourhoods from 1."""
    if k < 1:
        raise ValueError("schedule is defined for k >= 1")
    return c / math.log(k + 1)


def verify_diameter3(g: Graph) -> bool:
    return distance_summary(g).diameter == 3


# reports


@dataclass
class GraphStats:
    g: int
    aspl: Fraction | float
    diameter: int | float
    moore: Fraction
    gap: Fraction | float

    @classmethod
    def of(cls, graph: Graph) -> "GraphStats":
        s = distance_summary(graph)
        return cls(
            g=bounds.evaluation(graph),
            aspl=s.aspl,
            diameter=s.diameter,
            moore=bounds.moore_bound(graph.n, graph.degree),
            gap=bounds.aspl_gap(s.aspl, graph.n, graph.degree),
        )

    def to_dict(self) -> dict:
        fin = not (isinstance(self.aspl, float) and math.isinf(self.aspl))
        return {
            "g": self.g,
            "aspl": float(self.aspl) if fin else "inf",
            "aspl_exact": str(self.aspl) if fin else "inf",
            "diameter": self.diameter if fin else "inf",
            "diameter3": self.diameter == 3,
            "moore": float(self.moore),
            "aspl_gap": float(self.gap) if fin else "inf",
        }


@dataclass
class RunReport:
    algorithm: str
    seed: int | None
    config: dict
    n: int
    d: int
    initial: GraphStats
    final: GraphStats
    replacements: int = 0
    evaluations: int = 0
    status: str = ""
    wall_time: float = 0.0
    trajectory: list = field(default_factory=list)
    phases: list["RunReport"] = field(default_factory=list)
    graph: Graph | None = field(default=None, repr=False)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "config": self.config,
            "n": self.n,
            "d": self.d,
            "initial": self.initial.to_dict(),
            "final": self.final.to_dict(),
            "initial_g": self.initial.g,
            "final_g": self.final.g,
            "replacements": self.replacements,
            "evaluations": self.evaluations,
            "status": self.status,
            "trajectory": self.trajectory,
        }
        if timing:
            out["wall_time_s"] = round(self.wall_time, 3)
        if self.phases:
            out["phases"] = [p.to_dict(timing) for p in self.phases]
        return out


def _self_check(graph: Graph, tables: PathTables, tracked_g: int, full: bool) -> None:
    try:
        graph.check()
    except Exception as exc:  # GraphError
        raise InvariantViolation(str(exc)) from exc
    actual = bounds.evaluation(graph)
    if actual != tracked_g:
        raise InvariantViolation(f"tracked g={tracked_g} but recount gives {actual}")
    if full and not tables.equals(build(graph)):
        raise InvariantViolation("path tables drifted from a rebuild")


def _check_moore(stats: GraphStats, graph: Graph) -> None:
    if stats.diameter == 3 and stats.aspl < stats.moore:
        raise InvariantViolation(f"ASPL {stats.aspl} below Moore bound {stats.moore} for n={graph.n}")


class _Clock:
    def __init__(self, time_limit: float | None, log_interval: float | None):
        self.start = time.perf_counter()
        self.time_limit = time_limit
        self.log_interval = log_interval
        self._last_log = self.start

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def expired(self) -> bool:
        return self.time_limit is not None and self.elapsed >= self.time_limit

    def should_log(self) -> bool:
        if not self.log_interval:
            return False
        now = time.perf_counter()
        if now - self._last_log >= self.log_interval:
            self._last_log = now
            return True
        return False


# iterative first improvement

_OK, _OPTIMUM, _CHECK, _TRAJ_FULL = 0, 1, 2, 3
# indices into the IFI state vector
_P, _Q, _SINCE, _SINCE_SORT, _G, _REPL, _EVALS, _NTRAJ, _NEED_SORT, _CHECK_CNT = range(10)


@njit(cache=True, nogil=True)
def _sort_edges(edges, t2, t3, order):
    m = edges.shape[0]
    keys = np.empty(m, dtype=np.int64)
    for e in range(m):
        a = edges[e, 0]
        b = edges[e, 1]
        keys[e] = -(3 * np.int64(t2[a, b]) + 2 * np.int64(t3[a, b]))
    order[:] = np.argsort(keys, kind="mergesort")


@njit(cache=True, nogil=True)
def _ifi_chunk(indptr, indices, edges, t1, t2, t3, order, st, eval_limit,
               sort_interval, check_every, traj):
    m = edges.shape[0]
    total_pairs = m * (m - 1) // 2
    while True:
        if st[_NEED_SORT]:
            _sort_edges(edges, t2, t3, order)
            st[_NEED_SORT] = 0
            st[_P] = 0
            st[_Q] = 1
            st[_SINCE_SORT] = 0
        if st[_SINCE] >= total_pairs:
            return _OPTIMUM
        if st[_EVALS] >= eval_limit:
            return _OK
        p = st[_P]
        q = st[_Q]
        e1 = order[p]
        e2 = order[q]
        a = edges[e1, 0]
        b = edges[e1, 1]
        c0 = edges[e2, 0]
        d0 = edges[e2, 1]
        improved = False
        if not (a == c0 or a == d0 or b == c0 or b == d0):
            for direction in range(2):
                if direction == 0:
                    c = c0
                    d = d0
                else:
                    c = d0
                    d = c0
                if t1[a, c] or t1[b, d]:
                    continue
                st[_EVALS] += 1
                dg = _delta_g(t1, t2, t3, a, b, c, d)
                if dg < 0:
                    _apply(indptr, indices, edges, t1, t2, t3, e1, e2, a, b, c, d)
                    st[_G] += dg
                    st[_REPL] += 1
                    st[_SINCE_SORT] += 1
                    st[_CHECK_CNT] += 1
                    traj[st[_NTRAJ], 0] = st[_REPL]
                    traj[st[_NTRAJ], 1] = st[_G]
                    st[_NTRAJ] += 1
                    improved = True
                    break
        if improved:
            st[_SINCE] = 0
        else:
            st[_SINCE] += 1
        # next pair in (e1,e2), (e1,e3), ..., (e2,e3), ... order, wrapping
        q += 1
        if q >= m:
            p += 1
            q = p + 1
            if q >= m:
                p = 0
                q = 1
        st[_P] = p
        st[_Q] = q
        if improved:
            if st[_SINCE_SORT] >= sort_interval:
                st[_NEED_SORT] = 1
            if st[_NTRAJ] >= traj.shape[0]:
                return _TRAJ_FULL
            if check_every > 0 and st[_CHECK_CNT] >= check_every:
                st[_CHECK_CNT] = 0
                return _CHECK


@dataclass
class IfiConfig:
    sort_interval: int = 50
    max_steps: int | None = None  # evaluated switches; a pair's two rewirings are never split
    time_limit: float | None = None  # seconds
    check_every: int = 0  # self-check every N replacements (0: off)
    full_check: bool = False  # also compare tables against a rebuild
    chunk: int = 1 << 22
    log_interval: float | None = 10.0


@dataclass
class IfiState:
    """Resumable IFI state: edge order, pair cursor and counters."""

    order: np.ndarray
    vector: np.ndarray

    @classmethod
    def fresh(cls, m: int, g_value: int) -> "IfiState":
        v = np.zeros(10, dtype=np.int64)
        v[_G] = g_value
        v[_NEED_SORT] = 1
        v[_Q] = 1
        return cls(np.arange(m, dtype=np.int64), v)

    @property
    def pair_cursor(self) -> tuple[int, int]:
        return int(self.vector[_P]), int(self.vector[_Q])

    @property
    def replacements_since_sort(self) -> int:
        return int(self.vector[_SINCE_SORT])

    @property
    def g(self) -> int:
        return int(self.vector[_G])

    def sorted_edges(self, edges: np.ndarray) -> np.ndarray:
        return edges[self.order]


def ifi_run(g: Graph, config: IfiConfig | None = None, tables: PathTables | None = None,
            seed: int | None = None) -> RunReport:
    """Modified iterative first improvement with periodic edge re-sorting.

    Works on a copy of ``g``; the optimized graph is ``report.graph``.
    ``tables`` may be passed when they are already built for ``g`` (they are
    then updated in place).
    """
    cfg = config or IfiConfig()
    if not g.is_regular:
        raise ValueError("optimizers need a regular graph")
    graph = g if tables is not None else g.copy()
    t = tables if tables is not None else build(graph)
    initial = GraphStats.of(graph)
    _check_moore(initial, graph)
    state = IfiState.fresh(graph.m, initial.g)
    clock = _Clock(cfg.time_limit, cfg.log_interval)
    traj_buf = np.zeros((4096, 2), dtype=np.int64)
    trajectory = [[0, initial.g]]
    limit_total = cfg.max_steps if cfg.max_steps is not None else np.iinfo(np.int64).max
    status = "step_budget"

    if graph.m >= 2:
        while True:
            v = state.vector
            eval_limit = min(limit_total, int(v[_EVALS]) + cfg.chunk)
            code = _ifi_chunk(graph.indptr, graph.indices, graph.edges, t.t1, t.t2, t.t3,
                              state.order, v, eval_limit, cfg.sort_interval, cfg.check_every,
                              traj_buf)
            trajectory.extend(traj_buf[: v[_NTRAJ]].tolist())
            v[_NTRAJ] = 0
            graph.invalidate()
            if code == _CHECK:
                _self_check(graph, t, int(v[_G]), cfg.full_check)
            if clock.should_log():
                log.info("ifi evals=%d replacements=%d g=%d", v[_EVALS], v[_REPL], v[_G])
            if code == _OPTIMUM:
                status = "local_optimum"
                break
            if code == _OK and v[_EVALS] >= limit_total:
                status = "step_budget"
                break
            if clock.expired():
                status = "time_limit"
                break
    else:
        status = "local_optimum"

    if cfg.check_every:
        _self_check(graph, t, state.g, cfg.full_check)
    final = GraphStats.of(graph)
    _check_moore(final, graph)
    if final.g != state.g:
        raise InvariantViolation(f"tracked g={state.g} but final recount is {final.g}")
    return RunReport(
        algorithm="ifi",
        seed=seed,
        config=asdict(cfg),
        n=graph.n,
        d=graph.degree,
        initial=initial,
        final=final,
        replacements=int(state.vector[_REPL]),
        evaluations=int(state.vector[_EVALS]),
        status=status,
        wall_time=clock.elapsed,
        trajectory=trajectory,
        graph=graph,
    )


# simulated annealing

_SATURATED = 4
_K, _SG, _BEST, _ACC, _SCHECK = range(5)


@njit(cache=True, nogil=True)
def _sa_chunk(indptr, indices, edges, t1, t2, t3, st, k_limit, c, rng, max_tries,
              best_indices, best_edges, check_every):
    while st[_K] < k_limit:
        i1, i2, a, b, cc, d = _propose_t1(t1, edges, rng, max_tries)
        if i1 < 0:
            return _SATURATED
        st[_K] += 1
        temp = c / math.log(st[_K] + 1.0)
        dg = _delta_g(t1, t2, t3, a, b, cc, d)
        if _accept(dg, temp, rng):
            _apply(indptr, indices, edges, t1, t2, t3, i1, i2, a, b, cc, d)
            st[_SG] += dg
            st[_ACC] += 1
            st[_SCHECK] += 1
            if st[_SG] < st[_BEST]:
                st[_BEST] = st[_SG]
                best_indices[:] = indices
                best_edges[:, :] = edges
            if check_every > 0 and st[_SCHECK] >= check_every:
                st[_SCHECK] = 0
                return _CHECK
    return _OK


@dataclass
class SaConfig:
    schedule_c: float = 11.0
    max_steps: int | None = 10_000_000
    time_limit: float | None = None
    check_every: int = 0  # self-check every N accepted moves (0: off)
    full_check: bool = False
    chunk: int = 1 << 20
    max_tries: int = DEFAULT_MAX_TRIES
    log_interval: float | None = 10.0


@dataclass
class AnnealState:
    vector: np.ndarray
    best_indices: np.ndarray
    best_edges: np.ndarray

    @property
    def k(self) -> int:
        return int(self.vector[_K])

    @property
    def current_g(self) -> int:
        return int(self.vector[_SG])

    @property
    def best_g(self) -> int:
        return int(self.vector[_BEST])

    def temperature(self, c: float) -> float:
        return temperature(max(self.k, 1), c)


def sa_run(g: Graph, config: SaConfig | None = None, seed=None,
           tables: PathTables | None = None) -> RunReport:
    """Simulated annealing on g = 3*triangles + 2*squares; returns the best graph seen."""
    cfg = config or SaConfig()
    if not g.is_regular:
        raise ValueError("optimizers need a regular graph")
    if cfg.schedule_c <= 0:
        raise ValueError("schedule constant must be positive")
    graph = g if tables is not None else g.copy()
    t = tables if tables is not None else build(graph)
    rng = np.random.default_rng(seed)
    initial = GraphStats.of(graph)
    _check_moore(initial, graph)
    v = np.zeros(5, dtype=np.int64)
    v[_SG] = initial.g
    v[_BEST] = initial.g
    state = AnnealState(v, graph.indices.copy(), graph.edges.copy())
    clock = _Clock(cfg.time_limit, cfg.log_interval)
    trajectory = [[0, initial.g, initial.g]]
    limit_total = cfg.max_steps if cfg.max_steps is not None else np.iinfo(np.int64).max
    status = "step_budget"

    while state.k < limit_total:
        if graph.m < 2:
            status = "saturated"
            break
        k_limit = min(limit_total, state.k + cfg.chunk)
        code = _sa_chunk(graph.indptr, graph.indices, graph.edges, t.t1, t.t2, t.t3, v, k_limit,
                         float(cfg.schedule_c), rng, cfg.max_tries, state.best_indices,
                         state.best_edges, cfg.check_every)
        graph.invalidate()
        if code == _CHECK:
            _self_check(graph, t, state.current_g, cfg.full_check)
        else:
            trajectory.append([state.k, state.current_g, state.best_g])
        if clock.should_log():
            log.info("sa k=%d T=%.4f g=%d best=%d", state.k, state.temperature(cfg.schedule_c),
                     state.current_g, state.best_g)
        if code == _SATURATED:
            status = "saturated"
            break
        if clock.expired():
            status = "time_limit"
            break

    if cfg.check_every:
        _self_check(graph, t, state.current_g, cfg.full_check)
    best = graph.copy()
    best.indices[:] = state.best_indices
    best.edges[:] = state.best_edges
    best.invalidate()
    final = GraphStats.of(best)
    _check_moore(final, best)
    if final.g != state.best_g:
        raise InvariantViolation(f"best g={state.best_g} but recount gives {final.g}")
    if trajectory[-1][0] != state.k:
        trajectory.append([state.k, state.current_g, state.best_g])
    return RunReport(
        algorithm="sa",
        seed=seed,
        config=asdict(cfg),
        n=graph.n,
        d=graph.degree,
        initial=initial,
        final=final,
        replacements=int(v[_ACC]),
        evaluations=state.k,
        status=status,
        wall_time=clock.elapsed,
        trajectory=trajectory,
        graph=best,
    )


def pipeline_run(g: Graph, sa_config: SaConfig | None = None, ifi_config: IfiConfig | None = None,
                 seed=None) -> RunReport:
    """Annealing followed by first improvement on the annealed graph."""
    sa = sa_run(g, sa_config, seed=seed)
    ifi = ifi_run(sa.graph, ifi_config, seed=seed)
    return RunReport(
        algorithm="pipeline",
        seed=seed,
        config={"sa": sa.config, "ifi": ifi.config},
        n=g.n,
        d=g.degree,
        initial=sa.initial,
        final=ifi.final,
        replacements=sa.replacements + ifi.replacements,
        evaluations=sa.evaluations + ifi.evaluations,
        status=ifi.status,
        wall_time=sa.wall_time + ifi.wall_time,
        phases=[sa, ifi],
        graph=ifi.graph,
    )
