"""Ground and-or derivation trees and the coalgebraic reference semantics.

``build_ground_tree`` is the clause-tree construction restricted to
equality.  ``coalgebra_of`` and ``pn_tree`` form an independent oracle:
they never look at clause-trees, only at the map from each atom to the
set of its clause bodies, iterated to a fixed depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from .clausetree import (
    DEFAULT_BUDGET, GROUND, AndNode, ExpandOptions, Expander, ModeError,
    TemplateStore, canonical, count_nodes, has_success_subtree, roots_unifying,
)
from .parser import Program
from .terms import Atom, term_key, term_match


@dataclass
class GroundTree:
    root: AndNode
    truncated: bool = False
    node_count: int = 0
    leaf_count: int = 0


def build_ground_tree(store: TemplateStore, goal: Atom,
                      budget: int = DEFAULT_BUDGET,
                      expansion_threads: int = 1,
                      order_seed: Optional[int] = None,
                      executor=None) -> GroundTree:
    """Expand ``goal`` over a ground program, firing refs on syntactic equality.

    Raises ``ModeError`` for a non-ground program or goal.  When the tree
    would exceed ``budget`` nodes, expansion stops and ``truncated`` is set.
    """
    if not store.ground:
        raise ModeError("ground mode needs a ground program")
    if not goal.ground:
        raise ModeError(f"ground mode needs a ground goal, got {goal}")
    root = AndNode(goal, [], roots_unifying(store, goal, GROUND))
    opts = ExpandOptions(mode=GROUND, budget=budget, threads=expansion_threads,
                         order_seed=order_seed)
    own = executor is None and expansion_threads > 1
    if own:
        executor = ThreadPoolExecutor(max_workers=expansion_threads)
    try:
        exp = Expander(store, opts, 1, 1, executor)
        exp.run([root], root)
    finally:
        if own:
            executor.shutdown()
    nodes, leaves = count_nodes(root)
    return GroundTree(root, exp.truncated, nodes, leaves)


def has_success_subtree_ground(t: GroundTree) -> tuple[bool, Optional[AndNode]]:
    return has_success_subtree(t.root)


# -- coalgebraic oracle -----------------------------------------------------


Body = tuple  # sorted tuple of atoms: a multiset of body atoms


@dataclass
class CoalgebraMap:
    """``p(A)`` is the set of clause bodies whose head is ``A``.

    Bodies are kept as sorted tuples, so repeated atoms inside one body
    survive; the outer collection is a set.
    """

    at: frozenset
    p: dict = field(default_factory=dict)

    def __call__(self, a: Atom) -> frozenset:
        return self.p.get(a, frozenset())


def _body_key(body) -> Body:
    return tuple(sorted(body, key=term_key))


def coalgebra_of(program: Program) -> CoalgebraMap:
    if not program.ground:
        raise ModeError("the coalgebra of a program is defined here for ground programs only")
    at = set()
    p: dict = {}
    for c in program.clauses:
        at.add(c.head)
        at.update(c.body)
        p.setdefault(c.head, set()).add(_body_key(c.body))
    return CoalgebraMap(frozenset(at), {k: frozenset(v) for k, v in p.items()})


@dataclass
class PnTree:
    """Finite tree: ``atom`` with one bullet per body; each bullet lists subtrees."""

    atom: Atom
    bullets: tuple = ()  # tuple of tuples of PnTree

    def canonical(self):
        return (str(self.atom),
                tuple(sorted(tuple(sorted(c.canonical() for c in b)) for b in self.bullets)))

    def __eq__(self, other):
        return isinstance(other, PnTree) and self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())


def pn_tree(c: CoalgebraMap, goal: Atom, n: int) -> PnTree:
    """The depth-``2n`` unfolding of ``c`` from ``goal``; ``p_0`` is the identity."""
    memo: dict = {}

    def go(a: Atom, k: int) -> PnTree:
        key = (a, k)
        r = memo.get(key)
        if r is None:
            if k == 0:
                r = PnTree(a)
            else:
                bodies = sorted(c(a), key=lambda b: tuple(term_key(x) for x in b))
                r = PnTree(a, tuple(tuple(go(x, k - 1) for x in b) for b in bodies))
            memo[key] = r
        return r

    return go(goal, n)


def stable_pn_tree(c: CoalgebraMap, goal: Atom, max_n: int = 64) -> tuple[PnTree, int]:
    """Iterate ``n`` until ``pn_tree(n) == pn_tree(n+1)``; returns the tree and that ``n``.

    Raises ``RuntimeError`` if no fixed point appears by ``max_n`` (the
    unfolding is infinite for non-well-founded programs).
    """
    prev = pn_tree(c, goal, 0)
    prev_key = prev.canonical()
    for n in range(1, max_n + 1):
        cur = pn_tree(c, goal, n)
        key = cur.canonical()
        if key == prev_key:
            return prev, n - 1
        prev, prev_key = cur, key
    raise RuntimeError(f"p_n unfolding of {goal} did not stabilise within {max_n} steps")


def tree_canonical(root: AndNode):
    """Multiset-canonical form of a runtime tree, comparable with ``PnTree.canonical``."""
    return canonical(root, ordered=False)


def ground_instances(store: TemplateStore, goal: Atom) -> list[Atom]:
    """Distinct clause heads that are instances of ``goal``, in clause order."""
    out = {}
    for j in store.candidates(goal):
        h = store[j].head
        if h.ground and term_match(goal, h) is not None:
            out.setdefault(h, None)
    return list(out)


def _solve_one(args):
    store, atom, budget, threads = args
    t = build_ground_tree(store, atom, budget, threads)
    ok, w = has_success_subtree(t.root)
    return atom, t, w if ok else None


def ground_solve(store: TemplateStore, goal: Atom, workers: int = 1,
                 expansion_threads: int = 1,
                 budget: int = DEFAULT_BUDGET) -> list[tuple[Atom, GroundTree, Optional[AndNode]]]:
    """Answer a possibly non-ground goal over a ground program.

    Each ground clause head that is an instance of ``goal`` gets its own
    and-or tree; the trees are independent and are built by ``workers``
    threads.  Returns ``(instance, tree, witness or None)`` in clause order.
    """
    if not store.ground:
        raise ModeError("ground mode needs a ground program")
    atoms = [goal] if goal.ground else ground_instances(store, goal)
    jobs = [(store, a, budget, expansion_threads) for a in atoms]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_solve_one, jobs))
    return [_solve_one(j) for j in jobs]
