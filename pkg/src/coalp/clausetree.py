"""Clause-tree templates and the shared tree-expansion machinery.

A program is compiled once into one template per clause: the head
and-node, a single or-node, and one and-node per body atom.  Body nodes
carry an *open list* of clause indices whose heads unify with them.

Runtime trees (ground and-or trees and coinductive trees) are built from
the same ``AndNode``/``OrNode`` classes.  Expansion walks open lists: a
reference whose template head matches the node's atom (equals it, in
ground mode) is fired, copying the template's body under a new or-node;
a reference that only unifies is kept for later derivation steps; any
other reference is dropped.
"""

from __future__ import annotations

import random
from bisect import bisect_right
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional

from .parser import Program
from .terms import (
    TEMPLATE_INDEX, Atom, Subst, Var, apply, match_bindings, rename_index,
    unifiable, vars_of,
)

GROUND = "ground"
COINDUCTIVE = "coinductive"

DEFAULT_BUDGET = 1_000_000


class ModeError(ValueError):
    """Ground-mode operation applied to non-ground input."""


class OrNode:
    __slots__ = ("children", "clause")

    def __init__(self, children: Optional[list] = None, clause: int = -1):
        self.children: list[AndNode] = children if children is not None else []
        self.clause = clause

    def __repr__(self):
        return f"OrNode(clause={self.clause}, children={len(self.children)})"


class AndNode:
    """An atom node; ``proof`` is set on nodes compacted to a recorded success witness."""

    __slots__ = ("atom", "children", "open", "proof")

    def __init__(self, atom: Atom, children: Optional[list] = None,
                 open: Iterable[int] = (), proof: Optional["AndNode"] = None):
        self.atom = atom
        self.children: list[OrNode] = children if children is not None else []
        self.open: tuple[int, ...] = tuple(open)
        self.proof = proof

    # spec-facing aliases
    @property
    def or_children(self):
        return self.children

    @property
    def open_list(self):
        return self.open

    def __repr__(self):
        return f"AndNode({self.atom}, ors={len(self.children)}, open={list(self.open)})"


# -- traversal --------------------------------------------------------------


def iter_and_nodes(root: AndNode) -> Iterator[tuple[int, AndNode]]:
    """Breadth-first (level, node) pairs over and-nodes, left to right within a level."""
    q = deque([(0, root)])
    while q:
        lvl, n = q.popleft()
        yield lvl, n
        for o in n.children:
            for c in o.children:
                q.append((lvl + 2, c))


def count_nodes(root: AndNode) -> tuple[int, int]:
    """(node_count, leaf_count): all and/or nodes, and the childless ones among them."""
    nodes = leaves = 0
    stack = [root]
    while stack:
        n = stack.pop()
        nodes += 1
        if not n.children:
            leaves += 1
        for o in n.children:
            nodes += 1
            if not o.children:
                leaves += 1
            stack.extend(o.children)
    return nodes, leaves


def copy_tree(root: AndNode) -> AndNode:
    out = AndNode(root.atom, [], root.open, root.proof)
    stack = [(root, out)]
    while stack:
        src, dst = stack.pop()
        for o in src.children:
            kids = []
            for c in o.children:
                k = AndNode(c.atom, [], c.open, c.proof)
                kids.append(k)
                stack.append((c, k))
            dst.children.append(OrNode(kids, o.clause))
    return out


def apply_to_tree(root: AndNode, theta: Subst) -> None:
    """Apply a substitution to every atom of a tree in place."""
    b = theta.bindings
    stack = [root]
    while stack:
        n = stack.pop()
        if not n.atom.ground:
            n.atom = apply(b, n.atom)
            if n.proof is not None:
                # witnesses may be shared between tree copies
                n.proof = copy_tree(n.proof)
                apply_to_tree(n.proof, theta)
        for o in n.children:
            stack.extend(o.children)


def tree_vars(root: AndNode) -> set[Var]:
    out: set[Var] = set()
    for _, n in iter_and_nodes(root):
        if not n.atom.ground:
            out.update(vars_of(n.atom))
    return out


def canonical(root: AndNode, ordered: bool = False):
    """Hashable canonical form: and = (atom, ors), or = tuple of ands.

    With ``ordered=False`` children are sorted, giving multiset equality.
    Atoms are compared by their printed form, which is injective for the
    terms this package builds.
    """
    def and_c(n):
        ors = [or_c(o) for o in n.children]
        if not ordered:
            ors.sort()
        return (str(n.atom), tuple(ors))

    def or_c(o):
        ch = [and_c(c) for c in o.children]
        if not ordered:
            ch.sort()
        return tuple(ch)

    return and_c(root)


# -- templates --------------------------------------------------------------


@dataclass(frozen=True)
class Template:
    """Flat view of one compiled clause, in template variable space."""

    index: int
    head: Atom
    body: tuple[Atom, ...]
    body_open: tuple[tuple[int, ...], ...]
    body_only: tuple[Var, ...]

    def root(self) -> AndNode:
        """The clause-tree as an and/or node structure."""
        kids = [AndNode(b, [], o) for b, o in zip(self.body, self.body_open)]
        return AndNode(self.head, [OrNode(kids, self.index)], ())


class TemplateStore:
    """Immutable compiled program: one template per clause, indexed by clause position."""

    def __init__(self, program: Program, templates: list[Template]):
        self.program = program
        self._templates = tuple(templates)
        by_sig: dict = {}
        for t in templates:
            by_sig.setdefault(t.head.signature, []).append(t.index)
        self._by_sig = {k: tuple(v) for k, v in by_sig.items()}
        self.ground = program.ground

    def __len__(self):
        return len(self._templates)

    def __getitem__(self, i: int) -> Template:
        return self._templates[i]

    def __iter__(self):
        return iter(self._templates)

    @property
    def templates(self) -> list[AndNode]:
        return [t.root() for t in self._templates]

    def candidates(self, atom: Atom) -> tuple[int, ...]:
        return self._by_sig.get(atom.signature, ())

    def __getstate__(self):
        return {"program": self.program, "templates": self._templates}

    def __setstate__(self, st):
        self.__init__(st["program"], list(st["templates"]))


def _to_template_space(x):
    return rename_index(x, TEMPLATE_INDEX)


def compile_program(program: Program) -> TemplateStore:
    """Two passes: build one template per clause, then fill body open lists."""
    heads = []
    pass1 = []
    for i, c in enumerate(program.clauses):
        head = _to_template_space(c.head)
        body = tuple(_to_template_space(b) for b in c.body)
        hv = set(vars_of(head))
        body_only = []
        for b in body:
            for v in vars_of(b):
                if v not in hv and v not in body_only:
                    body_only.append(v)
        heads.append(head)
        pass1.append((i, head, body, tuple(body_only)))

    # heads renamed to a second private index so they never share variables with bodies
    other = [rename_index(h, TEMPLATE_INDEX - 1) for h in heads]
    by_sig: dict = {}
    for i, h in enumerate(heads):
        by_sig.setdefault(h.signature, []).append(i)

    templates = []
    for i, head, body, body_only in pass1:
        opens = tuple(
            tuple(j for j in by_sig.get(b.signature, ()) if unifiable(b, other[j]))
            for b in body
        )
        templates.append(Template(i, head, body, opens, body_only))
    return TemplateStore(program, templates)


compile = compile_program  # noqa: A001


def roots_unifying(store: TemplateStore, atom: Atom, mode: str = COINDUCTIVE,
                   occurs_check: bool = True) -> list[int]:
    """Clause indices whose template head equals (ground) or unifies with ``atom``."""
    if mode == GROUND:
        return [j for j in store.candidates(atom) if store[j].head == atom]
    return [j for j in store.candidates(atom)
            if unifiable(atom, store[j].head, occurs_check)]


# -- expansion --------------------------------------------------------------


@dataclass
class ExpansionBudget:
    max_nodes: int = DEFAULT_BUDGET


@dataclass
class ExpandOptions:
    mode: str = COINDUCTIVE
    budget: int = DEFAULT_BUDGET
    threads: int = 1
    occurs_check: bool = True
    order_seed: Optional[int] = None
    observer: Optional[Callable[[Atom, Atom, dict], None]] = None


class Expander:
    """Processes open lists until nothing more fires.

    ``next_var`` is the first rename-index free for variables introduced by
    clauses whose bodies mention variables absent from their heads.  After
    an expansion pass the indices it allocated are renumbered by first
    appearance in breadth-first order, so the resulting tree does not depend
    on the order in which work was done.
    """

    def __init__(self, store: TemplateStore, opts: ExpandOptions,
                 node_count: int, next_var: int,
                 executor: Optional[ThreadPoolExecutor] = None):
        self.store = store
        self.opts = opts
        self.ground = opts.mode == GROUND
        self.node_count = node_count
        self.next_var = next_var
        self.truncated = False
        self.executor = executor

    # pure part: decide the fate of every ref on one node
    def classify(self, node: AndNode):
        atom = node.atom
        keep = []
        fired = []
        store = self.store
        if self.ground:
            for j in node.open:
                if store[j].head == atom:
                    fired.append((j, None))
            return (), fired
        oc = self.opts.occurs_check
        obs = self.opts.observer
        for j in node.open:
            head = store[j].head
            b = match_bindings(head, atom)
            if b is not None:
                if obs is not None:
                    obs(head, atom, b)
                fired.append((j, b))
            elif unifiable(atom, head, oc):
                keep.append(j)
        return tuple(keep), fired

    def fire(self, node: AndNode, j: int, b: Optional[dict]) -> OrNode:
        t = self.store[j]
        if b is None:
            kids = [AndNode(a, [], o) for a, o in zip(t.body, t.body_open)]
        else:
            if t.body_only:
                k = self.next_var
                self.next_var += 1
                b = dict(b)
                for v in t.body_only:
                    b[v] = Var(v.name, k)
            kids = [AndNode(apply(b, a), [], o) for a, o in zip(t.body, t.body_open)]
        o = OrNode(kids, j)
        pos = bisect_right([x.clause for x in node.children], j)
        node.children.insert(pos, o)
        self.node_count += 1 + len(kids)
        return o

    def _over_budget(self) -> bool:
        if self.node_count > self.opts.budget:
            self.truncated = True
            return True
        return False

    def run(self, work: list[AndNode], root: AndNode) -> None:
        start = self.next_var
        if self.opts.order_seed is not None:
            self._run_random(work)
        else:
            self._run_waves(work)
        if self.next_var > start:
            self.next_var = renumber_fresh(root, start)

    def _run_waves(self, work: list[AndNode]) -> None:
        ex = self.executor
        while work:
            work = [n for n in work if n.open]
            if not work:
                break
            if ex is not None and len(work) > 1:
                chunks = _chunks(work, self.opts.threads * 4)
                parts = list(ex.map(lambda ns: [self.classify(n) for n in ns], chunks))
                results = [r for p in parts for r in p]
            else:
                results = [self.classify(n) for n in work]
            nxt = []
            for n, (keep, fired) in zip(work, results):
                n.open = keep
                for j, b in fired:
                    nxt.extend(self.fire(n, j, b).children)
            if self._over_budget():
                return
            work = nxt

    def _run_random(self, work: list[AndNode]) -> None:
        rng = random.Random(self.opts.order_seed)
        pool = [n for n in work if n.open]
        while pool:
            i = rng.randrange(len(pool))
            pool[i], pool[-1] = pool[-1], pool[i]
            n = pool.pop()
            keep, fired = self.classify(n)
            n.open = keep
            rng.shuffle(fired)
            for j, b in fired:
                pool.extend(c for c in self.fire(n, j, b).children if c.open)
            if self._over_budget():
                return


def _chunks(xs: list, k: int) -> list[list]:
    k = max(1, min(k, len(xs)))
    size = -(-len(xs) // k)
    return [xs[i:i + size] for i in range(0, len(xs), size)]


def renumber_fresh(root: AndNode, start: int) -> int:
    """Renumber rename-indices >= ``start`` by breadth-first first appearance.

    Returns the next free index.
    """
    mapping: dict[int, int] = {}
    nxt = start
    for _, n in iter_and_nodes(root):
        if n.atom.ground:
            continue
        for v in vars_of(n.atom):
            if v.index >= start and v.index not in mapping:
                mapping[v.index] = nxt
                nxt += 1
    if all(k == v for k, v in mapping.items()):
        return nxt
    sub = {}
    stack = [root]
    while stack:
        n = stack.pop()
        if not n.atom.ground:
            for v in vars_of(n.atom):
                if v.index in mapping and v not in sub:
                    sub[v] = Var(v.name, mapping[v.index])
        for o in n.children:
            stack.extend(o.children)
    apply_to_tree(root, Subst(sub))
    return nxt


def max_var_index(root: AndNode) -> int:
    top = 0
    for _, n in iter_and_nodes(root):
        if not n.atom.ground:
            for v in vars_of(n.atom):
                if v.index > top:
                    top = v.index
    return top


# -- success subtrees -------------------------------------------------------


def success_witness(root: AndNode) -> Optional[AndNode]:
    """A minimal success subtree of ``root``, or ``None``.

    An and-node needs one successful or-child, an or-node needs all of its
    and-children, and an or-node without children is an empty goal.  Among
    the candidates the witness with fewest nodes is chosen; ties go to the
    earliest or-child, which is the lowest clause index.  Nodes compacted
    after an earlier success contribute their recorded proof.
    """
    memo: dict[int, Optional[tuple[int, AndNode]]] = {}

    # post-order without recursion so deep trees are fine
    order = []
    stack = [root]
    while stack:
        n = stack.pop()
        order.append(n)
        for o in n.children:
            stack.extend(o.children)
    for n in reversed(order):
        if n.proof is not None:
            memo[id(n)] = (_size(n.proof), n.proof)
            continue
        best = None
        for o in n.children:
            total = 1
            kids = []
            for c in o.children:
                r = memo[id(c)]
                if r is None:
                    break
                total += r[0]
                kids.append(r[1])
            else:
                if best is None or total < best[0]:
                    best = (total, o.clause, kids)
        if best is None:
            memo[id(n)] = None
        else:
            w = AndNode(n.atom, [OrNode(best[2], best[1])])
            memo[id(n)] = (1 + best[0], w)
    r = memo[id(root)]
    return None if r is None else r[1]


def _size(n: AndNode) -> int:
    return count_nodes(n)[0]


def has_success_subtree(root: AndNode) -> tuple[bool, Optional[AndNode]]:
    w = success_witness(root)
    return w is not None, w
