"""Small breadth-first SLD-resolution engine, used only as a cross-check in tests."""

from __future__ import annotations

from collections import deque
from typing import Iterator

from .parser import Program
from .terms import EMPTY, Goal, Subst, apply, compose, standardise_apart, unify, vars_of


def sld_answers(program: Program, goal: Goal, max_depth: int = 12,
                max_nodes: int = 200_000) -> Iterator[Subst]:
    """Computed answers (restricted to goal variables) of all refutations up to ``max_depth`` steps.

    Leftmost selection, all clauses tried at every step, breadth first.
    """
    gvars = vars_of(goal)
    q = deque([(goal.atoms, EMPTY, 0)])
    seen_nodes = 0
    while q:
        atoms, theta, depth = q.popleft()
        seen_nodes += 1
        if seen_nodes > max_nodes:
            return
        if not atoms:
            yield theta.restrict(gvars)
            continue
        if depth >= max_depth:
            continue
        sel, rest = atoms[0], atoms[1:]
        taken = set(vars_of(Goal(atoms))) | set(gvars)
        taken.update(theta.bindings)
        for t in theta.bindings.values():
            taken.update(vars_of(t))
        for c in program.clauses:
            if c.head.signature != sel.signature:
                continue
            c2 = standardise_apart(c, taken)
            mgu = unify(sel, c2.head)
            if mgu is None:
                continue
            new_atoms = tuple(apply(mgu, a) for a in c2.body + rest)
            q.append((new_atoms, compose(theta, mgu), depth + 1))
