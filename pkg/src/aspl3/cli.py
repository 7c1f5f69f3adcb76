"""Command-line interface.

    aspl3 gen      --n 1000 --d 32 --seed 1 --out g.edges
    aspl3 eval     --in g.edges
    aspl3 bounds   --in g.edges --t-max 3
    aspl3 ifi      --in g.edges --out best.edges --report run.json
    aspl3 sa       --n 1000 --d 32 --seed 7 --max-steps 10000000
    aspl3 pipeline --n 1000 --d 32 --seed 7 --runs 4

Reports go to stdout as JSON unless ``--report`` is given; progress goes to
stderr.  Exit codes: 0 ok, 2 usage/infeasible, 3 I/O or parse error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import bounds, graph, search
from .errors import EdgeListParseError, FeasibilityError, InvariantViolation, TableSizeError

OUTPUT_DIR_ENV = "ASPL3_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("aspl3")


@dataclass
class Config:
    command: str
    n: int | None = None
    d: int | None = None
    seed: int = 0
    max_steps: int | None = None
    time_limit: float | None = None
    schedule_c: float = 11.0
    sort_interval: int = 50
    t_max: int = 3
    in_path: str | None = None
    out_path: str | None = None
    report_path: str | None = None
    rounds: int | None = None
    runs: int = 1
    timing: bool = True
    check_every: int = 0
    log_interval: float = 10.0

    def validate(self) -> None:
        if self.max_steps is not None and self.max_steps < 0:
            raise FeasibilityError("--max-steps must be non-negative")
        if self.time_limit is not None and self.time_limit <= 0:
            raise FeasibilityError("--time-limit must be positive")
        if self.sort_interval <= 0:
            raise FeasibilityError("--sort-interval must be positive")
        if self.schedule_c <= 0:
            raise FeasibilityError("--schedule-c must be positive")
        if self.t_max < 1:
            raise FeasibilityError("--t-max must be >= 1")
        if self.runs < 1:
            raise FeasibilityError("--runs must be >= 1")
        if self.in_path is None and self.command in ("eval", "bounds"):
            raise FeasibilityError(f"{self.command} needs --in")
        if self.in_path is None and self.command in ("gen", "ifi", "sa", "pipeline"):
            if self.n is None or self.d is None:
                raise FeasibilityError("give --in or both --n and --d")
            graph.check_feasible(self.n, self.d)


def _dump(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=False) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _output_path(cfg: Config, stem: str) -> Path:
    if cfg.out_path:
        return Path(cfg.out_path)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{stem}.edges"


def _num(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return float(x)


def graph_summary(g: graph.Graph) -> dict:
    s = graph.distance_summary(g)
    h = bounds.CommonNeighborHistogram.of(g)
    tri, sq = h.triangles(), h.squares()
    out = {
        "n": g.n,
        "edges": g.m,
        "d": g.degree,
        "regular": g.is_regular,
        "aspl": _num(s.aspl),
        "aspl_exact": str(s.aspl),
        "diameter": s.diameter if s.connected else "inf",
        "n1": s.n1,
        "n2": s.n2,
        "n3": s.n3,
        "farther_or_unreachable": s.unreachable_or_farther,
        "triangles": tri,
        "squares": sq,
        "g": 3 * tri + 2 * sq,
    }
    if g.is_regular and g.n > 1:
        low = bounds.moore_bound(g.n, g.degree)
        out["moore"] = float(low)
        out["aspl_gap"] = _num(bounds.aspl_gap(s.aspl, g.n, g.degree)) if s.connected else "inf"
    else:
        out["moore"] = None
        out["aspl_gap"] = None
        out["note"] = "graph is not regular; Moore bound and gap do not apply"
    return out


def cmd_gen(cfg: Config) -> int:
    g = graph.random_regular(cfg.n, cfg.d, seed=cfg.seed, rounds=cfg.rounds)
    path = _output_path(cfg, f"n{cfg.n}_d{cfg.d}_s{cfg.seed}")
    graph.write_edge_list(g, path)
    summary = graph_summary(g)
    summary["seed"] = cfg.seed
    summary["path"] = str(path)
    _dump(summary, cfg.report_path)
    return EXIT_OK


def cmd_eval(cfg: Config) -> int:
    g = graph.read_edge_list(cfg.in_path, n=cfg.n)
    _dump(graph_summary(g), cfg.report_path)
    return EXIT_OK


def cmd_bounds(cfg: Config) -> int:
    g = graph.read_edge_list(cfg.in_path, n=cfg.n)
    rep = bounds.bounds_report(g, cfg.t_max)
    _dump(rep.to_dict(), cfg.report_path)
    return EXIT_OK


def _initial_graph(cfg: Config, seed: int) -> graph.Graph:
    if cfg.in_path:
        return graph.read_edge_list(cfg.in_path, n=cfg.n)
    return graph.random_regular(cfg.n, cfg.d, seed=seed, rounds=cfg.rounds)


def _one_run(cfg: Config, seed: int) -> search.RunReport:
    g = _initial_graph(cfg, seed)
    if not g.is_regular:
        raise FeasibilityError("optimizers need a regular input graph")
    log_interval = cfg.log_interval if cfg.log_interval > 0 else None
    ifi_cfg = search.IfiConfig(
        sort_interval=cfg.sort_interval,
        max_steps=cfg.max_steps,
        time_limit=cfg.time_limit,
        check_every=cfg.check_every,
        log_interval=log_interval,
    )
    sa_cfg = search.SaConfig(
        schedule_c=cfg.schedule_c,
        max_steps=cfg.max_steps if cfg.max_steps is not None else search.SaConfig.max_steps,
        time_limit=cfg.time_limit,
        check_every=cfg.check_every,
        log_interval=log_interval,
    )
    if cfg.command == "ifi":
        return search.ifi_run(g, ifi_cfg, seed=seed)
    if cfg.command == "sa":
        return search.sa_run(g, sa_cfg, seed=seed)
    return search.pipeline_run(g, sa_cfg, ifi_cfg, seed=seed)


def _rank(rep: search.RunReport):
    aspl = rep.final.aspl
    return (float(aspl), rep.final.g, rep.seed)


def cmd_optimize(cfg: Config) -> int:
    seeds = [cfg.seed + r for r in range(cfg.runs)]
    if cfg.runs == 1:
        reports = [_one_run(cfg, seeds[0])]
    else:
        with ThreadPoolExecutor(max_workers=cfg.runs) as pool:
            reports = list(pool.map(lambda s: _one_run(cfg, s), seeds))
    best = min(reports, key=_rank)
    stem = f"{cfg.command}_n{best.n}_d{best.d}_s{best.seed}"
    path = _output_path(cfg, stem)
    graph.write_edge_list(best.graph, path)
    out = best.to_dict(timing=cfg.timing)
    out["path"] = str(path)
    if cfg.runs > 1:
        out["runs"] = [
            {"seed": r.seed, "final_g": r.final.g, "final_aspl": float(r.final.aspl),
             "status": r.status}
            for r in reports
        ]
    _dump(out, cfg.report_path)
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "eval": cmd_eval,
    "bounds": cmd_bounds,
    "ifi": cmd_optimize,
    "sa": cmd_optimize,
    "pipeline": cmd_optimize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aspl3", description="Low-ASPL regular graphs of diameter 3 by local search."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, graph_source=True):
        if graph_source:
            p.add_argument("--in", dest="in_path", help="input edge list")
            p.add_argument("--n", type=int, help="order")
            p.add_argument("--d", type=int, help="degree")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--rounds", type=int, help="randomizing switches (default 10*|E|)")
        p.add_argument("--report", dest="report_path", help="write JSON report here instead of stdout")
        p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("gen", help="write a random regular graph")
    common(p)
    p.add_argument("--out", dest="out_path")

    p = sub.add_parser("eval", help="exact ASPL, diameter and g of an edge list")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--n", type=int, help="declared order (for isolated top nodes)")
    common(p, graph_source=False)

    p = sub.add_parser("bounds", help="T(m), truncated bounds and the exact identity")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--t-max", type=int, default=3)
    common(p, graph_source=False)

    for name, text in (("ifi", "first improvement"), ("sa", "simulated annealing"),
                       ("pipeline", "annealing then first improvement")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--out", dest="out_path")
        p.add_argument("--max-steps", type=int, help="evaluation budget")
        p.add_argument("--time-limit", type=float, help="seconds")
        p.add_argument("--schedule-c", type=float, default=11.0)
        p.add_argument("--sort-interval", type=int, default=50)
        p.add_argument("--runs", type=int, default=1, help="independent seeded runs, best reported")
        p.add_argument("--check-every", type=int, default=0,
                       help="self-check after every N accepted moves")
        p.add_argument("--log-interval", type=float, default=10.0, help="seconds between progress lines")
        p.add_argument("--no-timing", dest="timing", action="store_false",
                       help="omit wall time so reports are byte-reproducible")
    return parser


def parse_config(argv=None) -> tuple[Config, bool]:
    ns = vars(build_parser().parse_args(argv))
    verbose = ns.pop("verbose", False)
    fields = Config.__dataclass_fields__
    return Config(**{k: v for k, v in ns.items() if k in fields}), verbose


def main(argv=None) -> int:
    cfg, verbose = parse_config(argv)
    logging.basicConfig(
        level=logging.INFO if verbose or cfg.command in ("ifi", "sa", "pipeline") else logging.WARNING,
        format="%(asctime)s %(name)s %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except (FeasibilityError, TableSizeError) as exc:
        print(f"aspl3: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EdgeListParseError, OSError) as exc:
        print(f"aspl3: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvariantViolation as exc:
        print(f"aspl3: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
