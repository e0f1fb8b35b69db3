"""Breadth-first coinductive derivation search over a work queue.

A coordinator owns the queue and a buffer of found solutions.  It hands
fixed-size batches of states to a pool of worker processes, which return
the successor states of each one.  Successors are queued in submission
order, so the sequence of processed states does not depend on the number
of workers.  A buffered solution of rank ``r`` is released once no queued
state has a rank below ``r``; every later solution then has rank ``>= r``.
"""

from __future__ import annotations

import multiprocessing as mp
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator, Optional

from .clausetree import DEFAULT_BUDGET, AndNode, TemplateStore
from .cotree import DerivationState, StepConfig, derive_step, initial_state
from .terms import Atom, Subst, apply, frontier, rtl_key, term_key

DEFAULT_MAX_STEPS = 10_000
BATCH_SIZE = 64


@dataclass
class SearchConfig:
    worker_threads: int = 1
    parallel_expansion: bool = False
    expansion_threads: int = 1
    max_solutions: Optional[int] = None
    max_steps: Optional[int] = DEFAULT_MAX_STEPS
    queue_discipline: str = "fifo"
    prune: bool = True
    budget: int = DEFAULT_BUDGET
    occurs_check: bool = True
    batch_size: int = BATCH_SIZE
    timeout: Optional[float] = None

    def __post_init__(self):
        if self.worker_threads < 1:
            raise ValueError("worker_threads must be at least 1")
        if self.parallel_expansion and self.expansion_threads < 1:
            raise ValueError("expansion_threads must be at least 1 with parallel expansion")
        if self.queue_discipline not in ("fifo", "lifo"):
            raise ValueError(f"unknown queue discipline {self.queue_discipline!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")

    def step_config(self) -> StepConfig:
        threads = self.expansion_threads if self.parallel_expansion else 1
        return StepConfig(budget=self.budget, expansion_threads=threads,
                          prune=self.prune, occurs_check=self.occurs_check)


@dataclass
class Solution:
    answer: Subst
    witness: AndNode
    rank: int
    goal: Atom
    chain: tuple

    @property
    def instance(self) -> Atom:
        return apply(self.answer, self.goal)

    def sort_key(self):
        inst = self.instance
        return (
            self.rank,
            tuple(term_key(x) for x in frontier(inst)),
            rtl_key(inst),
            tuple(s.key() for s in self.chain),
        )

    def __str__(self):
        return f"{self.instance}  |  {self.answer}  |  {self.rank}"


# -- worker side ------------------------------------------------------------

_W_STORE: Optional[TemplateStore] = None
_W_CFG: Optional[StepConfig] = None
_W_EXEC: Optional[ThreadPoolExecutor] = None


def _init_worker(store: TemplateStore, cfg: StepConfig):
    global _W_STORE, _W_CFG, _W_EXEC
    _W_STORE = store
    _W_CFG = cfg
    _W_EXEC = (ThreadPoolExecutor(max_workers=cfg.expansion_threads)
               if cfg.expansion_threads > 1 else None)


def _work(batch: list[DerivationState]) -> list[list[DerivationState]]:
    return [derive_step(s, _W_STORE, _W_CFG, _W_EXEC) for s in batch]


# -- coordinator ------------------------------------------------------------


class SearchRun:
    """Iterable stream of solutions in rank order.

    After iteration ends, ``status`` is ``"complete"`` (queue drained),
    ``"solutions"`` (``max_solutions`` reached), ``"exhausted"``
    (``max_steps`` reached before the queue drained) or ``"timeout"``.  ``steps`` counts
    processed derivation states.
    """

    def __init__(self, store: TemplateStore, goal: Atom, cfg: SearchConfig):
        self.store = store
        self.goal = goal
        self.cfg = cfg
        self.status: Optional[str] = None
        self.steps = 0
        self.emitted = 0
        self.states_created = 0

    def __iter__(self) -> Iterator[Solution]:
        return self._run()

    def _solution(self, st: DerivationState) -> Solution:
        return Solution(st.answer(), st.witness, st.rank, self.goal, st.chain)

    def _run(self) -> Iterator[Solution]:
        cfg = self.cfg
        step_cfg = cfg.step_config()
        lifo = cfg.queue_discipline == "lifo"
        queue: deque[DerivationState] = deque()
        buffer: list[Solution] = []
        limit = cfg.max_solutions
        deadline = None if cfg.timeout is None else time.monotonic() + cfg.timeout

        def accept(st: DerivationState):
            self.states_created += 1
            if st.witness is not None:
                buffer.append(self._solution(st))
            if st.open:
                queue.append(st)

        def release(bound: Optional[int]):
            """Pop buffered solutions with rank <= bound (all if None), in order."""
            ready = [s for s in buffer if bound is None or s.rank <= bound]
            if not ready:
                return []
            ready.sort(key=Solution.sort_key)
            keep = [s for s in buffer if not (bound is None or s.rank <= bound)]
            buffer[:] = keep
            return ready

        executor = None
        local_exec = None
        if cfg.worker_threads > 1:
            executor = ProcessPoolExecutor(
                max_workers=cfg.worker_threads,
                mp_context=mp.get_context("fork"),
                initializer=_init_worker,
                initargs=(self.store, step_cfg),
            )
        elif step_cfg.expansion_threads > 1:
            local_exec = ThreadPoolExecutor(max_workers=step_cfg.expansion_threads)
        try:
            accept(initial_state(self.store, self.goal, step_cfg, local_exec))
            while True:
                bound = min((s.rank for s in queue), default=None)
                for sol in release(bound):
                    yield sol
                    self.emitted += 1
                    if limit is not None and self.emitted >= limit:
                        self.status = "solutions"
                        return
                if not queue:
                    self.status = "complete"
                    return
                room = (cfg.max_steps - self.steps) if cfg.max_steps is not None else None
                if room is not None and room <= 0:
                    self.status = "exhausted"
                    return
                if deadline is not None and time.monotonic() > deadline:
                    self.status = "timeout"
                    return
                size = cfg.batch_size if room is None else min(cfg.batch_size, room)
                batch = [queue.pop() if lifo else queue.popleft()
                         for _ in range(min(size, len(queue)))]
                if executor is None:
                    results = [derive_step(s, self.store, step_cfg, local_exec) for s in batch]
                else:
                    n = cfg.worker_threads
                    per = -(-len(batch) // n)
                    parts = [batch[i:i + per] for i in range(0, len(batch), per)]
                    results = [r for part in executor.map(_work, parts) for r in part]
                self.steps += len(batch)
                for succ in results:
                    for st in succ:
                        accept(st)
        finally:
            if executor is not None:
                executor.shutdown(cancel_futures=True)
            if local_exec is not None:
                local_exec.shutdown()


def search(store: TemplateStore, goal: Atom, cfg: Optional[SearchConfig] = None,
           **overrides) -> SearchRun:
    """Start a derivation search; iterate the result for solutions."""
    if cfg is None:
        cfg = SearchConfig(**overrides)
    elif overrides:
        cfg = replace(cfg, **overrides)
    return SearchRun(store, goal, cfg)
