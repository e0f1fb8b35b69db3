"""Benchmark harness: repeated timed runs per configuration, CSV and text tables."""

from __future__ import annotations

import csv
import re
import statistics
import time
from dataclasses import asdict, dataclass, replace
from typing import Optional

from .clausetree import compile_program
from .cotree import build_cotree
from .ground import ground_solve
from .parser import Program
from .search import SearchConfig, search
from .terms import Atom

_CFG_RE = re.compile(r"^(\d+)t(?:\+(\d+)e)?$")


def parse_config(label: str, base: Optional[SearchConfig] = None) -> SearchConfig:
    """``"4t"`` is 4 workers; ``"6t+6e"`` adds parallel expansion with 6 expansion threads."""
    m = _CFG_RE.match(label.strip())
    if not m:
        raise ValueError(f"bad config {label!r}; expected e.g. 1t, 4t or 6t+6e")
    threads = int(m.group(1))
    exp = int(m.group(2)) if m.group(2) else 0
    base = base or SearchConfig()
    return replace(base, worker_threads=threads, parallel_expansion=exp > 0,
                   expansion_threads=max(exp, 1))


def config_label(cfg: SearchConfig) -> str:
    s = f"{cfg.worker_threads}t"
    if cfg.parallel_expansion:
        s += f"+{cfg.expansion_threads}e"
    return s


@dataclass
class BenchReport:
    program: str
    config: str
    threads: int
    parallel_expansion: bool
    expansion_threads: int
    repeats: int
    wall_median: float
    wall_min: float
    node_count: int
    leaf_count: int
    solutions: int
    status: str
    speedup: float = 1.0


def _run_once(store, goal: Atom, cfg: SearchConfig, mode: str):
    t0 = time.perf_counter()
    if mode == "ground":
        threads = cfg.expansion_threads if cfg.parallel_expansion else 1
        res = ground_solve(store, goal, cfg.worker_threads, threads, cfg.budget)
        dt = time.perf_counter() - t0
        nodes = sum(t.node_count for _, t, _ in res)
        leaves = sum(t.leaf_count for _, t, _ in res)
        truncated = any(t.truncated for _, t, _ in res)
        sols = sum(1 for *_, w in res if w is not None)
        if cfg.timeout is not None and dt > cfg.timeout:
            return dt, nodes, leaves, sols, "timeout"
        return dt, nodes, leaves, sols, "truncated" if truncated else "complete"
    run = search(store, goal, cfg)
    sols = sum(1 for _ in run)
    dt = time.perf_counter() - t0
    tree = build_cotree(store, goal, cfg.budget)
    return dt, tree.node_count, tree.leaf_count, sols, run.status


def run_bench(program: Program, goal: Atom, cfgs: list[SearchConfig], repeats: int = 3,
              mode: str = "coinductive", program_id: str = "program") -> list[BenchReport]:
    """Time every configuration ``repeats`` times, strictly one after another.

    Speedup is relative to the single-worker, no-expansion row when there is
    one, otherwise to the first row.
    """
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    if not cfgs:
        raise ValueError("at least one configuration is needed")
    store = compile_program(program)
    rows = []
    for cfg in cfgs:
        times = []
        last = None
        for _ in range(repeats):
            last = _run_once(store, goal, cfg, mode)
            times.append(last[0])
            if last[4] == "timeout":
                break
        _, nodes, leaves, sols, status = last
        rows.append(BenchReport(
            program_id, config_label(cfg), cfg.worker_threads, cfg.parallel_expansion,
            cfg.expansion_threads if cfg.parallel_expansion else 0, len(times),
            statistics.median(times), min(times), nodes, leaves, sols, status,
        ))
    base = next((r for r in rows if r.threads == 1 and not r.parallel_expansion), rows[0])
    for r in rows:
        r.speedup = base.wall_median / r.wall_median if r.wall_median > 0 else float("inf")
    return rows


FIELDS = list(BenchReport.__dataclass_fields__)


def write_csv(rows: list[BenchReport], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow(asdict(r))


def format_table(rows: list[BenchReport]) -> str:
    head = ["config", "median s", "min s", "speedup", "nodes", "leaves", "solutions", "status"]
    body = [[r.config, f"{r.wall_median:.4f}", f"{r.wall_min:.4f}", f"{r.speedup:.2f}",
             str(r.node_count), str(r.leaf_count), str(r.solutions), r.status] for r in rows]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    line = lambda cells: "  ".join(c.rjust(w) for c, w in zip(cells, widths))  # noqa: E731
    return "\n".join([line(head), line(["-" * w for w in widths])] + [line(b) for b in body])
