"""Coinductive trees, derivation steps and tree pruning."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .clausetree import (
    COINDUCTIVE, DEFAULT_BUDGET, AndNode, ExpandOptions, Expander, OrNode,
    TemplateStore, apply_to_tree, copy_tree, count_nodes, iter_and_nodes,
    max_var_index, roots_unifying, success_witness,
)
from .terms import (
    TEMPLATE_INDEX, Atom, Subst, Var, apply, compose_all, unify, vars_of,
)


@dataclass
class CoTree:
    root: AndNode
    goal: Atom
    truncated: bool = False
    next_var: int = 1

    @property
    def node_count(self) -> int:
        return count_nodes(self.root)[0]

    @property
    def leaf_count(self) -> int:
        return count_nodes(self.root)[1]

    def copy(self) -> "CoTree":
        return CoTree(copy_tree(self.root), self.goal, self.truncated, self.next_var)


@dataclass
class BuildConfig:
    budget: int = DEFAULT_BUDGET
    expansion_threads: int = 1
    occurs_check: bool = True
    order_seed: Optional[int] = None
    observer: object = None


def _expander(store, mode, cfg: BuildConfig, node_count, next_var, executor):
    opts = ExpandOptions(
        mode=mode, budget=cfg.budget, threads=cfg.expansion_threads,
        occurs_check=cfg.occurs_check, order_seed=cfg.order_seed,
        observer=cfg.observer,
    )
    return Expander(store, opts, node_count, next_var, executor)


def _with_executor(threads: int):
    if threads and threads > 1:
        return ThreadPoolExecutor(max_workers=threads)
    return None


def build_cotree(store: TemplateStore, goal: Atom,
                 budget: int = DEFAULT_BUDGET,
                 cfg: Optional[BuildConfig] = None,
                 executor: Optional[ThreadPoolExecutor] = None) -> CoTree:
    """Coinductive tree of ``goal``: refs fire on term matching, unifiable ones stay open."""
    cfg = cfg or BuildConfig(budget=budget)
    root = AndNode(goal, [], roots_unifying(store, goal, COINDUCTIVE, cfg.occurs_check))
    next_var = max_var_index(root) + 1
    own = executor is None and cfg.expansion_threads > 1
    ex = _with_executor(cfg.expansion_threads) if own else executor
    try:
        exp = _expander(store, COINDUCTIVE, cfg, 1, next_var, ex)
        exp.run([root], root)
    finally:
        if own:
            ex.shutdown()
    return CoTree(root, goal, exp.truncated, exp.next_var)


# -- open nodes -------------------------------------------------------------


@dataclass(frozen=True)
class OpenNode:
    node: AndNode
    ref: int
    mgu: Subst
    level: int


def _mgu(node_atom: Atom, store: TemplateStore, j: int, fresh: int,
         occurs_check: bool) -> Optional[Subst]:
    """mgu of a node atom and a template head, restricted to tree variables.

    Template variables left in the range are renamed to rename-index
    ``fresh``, which keeps them apart from every variable in the tree.
    """
    theta = unify(node_atom, store[j].head, occurs_check)
    if theta is None:
        return None
    out = {}
    ren = {}
    for v, t in theta.items():
        if v.index == TEMPLATE_INDEX:
            continue
        if not t.ground:
            for w in vars_of(t):
                if w.index == TEMPLATE_INDEX and w not in ren:
                    ren[w] = Var(w.name, fresh)
            if ren:
                t = apply(ren, t)
        out[v] = t
    return Subst(out)


def find_open_nodes(t: CoTree, store: TemplateStore,
                    occurs_check: bool = True,
                    first_only: bool = False) -> list[OpenNode]:
    """Open refs in breadth-first order, with distinct mgus per node.

    Every and-node is inspected, not just leaves.  ``first_only`` stops
    after the first node that has an open ref.
    """
    out: list[OpenNode] = []
    for lvl, n in iter_and_nodes(t.root):
        if not n.open:
            continue
        seen = set()
        for j in n.open:
            th = _mgu(n.atom, store, j, t.next_var, occurs_check)
            if th is None or th in seen:
                continue
            seen.add(th)
            out.append(OpenNode(n, j, th, lvl))
        if first_only and out:
            break
    return out


def has_open(root: AndNode) -> bool:
    return any(n.open for _, n in iter_and_nodes(root))


# -- pruning ----------------------------------------------------------------


def prune_and_compact(t: CoTree) -> CoTree:
    """Prune and compact in place; returns ``t``.

    * An and-node with no open refs, no proof and no or-children left is
      dead, and so is any or-node containing a dead child; dead or-nodes
      are removed from their parents.
    * A closed subtree (no open refs anywhere in it) that holds a success
      subtree is compacted to ``atom -- or -- []`` with ``proof`` recording
      the witness.
    * A non-root and-node with no open refs and a single non-empty
      or-child is spliced out: its and-children take its place in the
      parent or-node.
    """
    _prune(t.root)
    return t


def _prune(root: AndNode) -> tuple[bool, bool]:
    """Returns (dead, closed) for ``root`` after pruning beneath it."""
    # explicit post-order: budget-truncated trees can be far deeper than the stack
    done: dict[int, tuple[bool, bool]] = {}
    stack = [(root, False)]
    while stack:
        n, expanded = stack.pop()
        if n.proof is not None:
            done[id(n)] = (False, not n.open)
            continue
        if not expanded:
            stack.append((n, True))
            stack.extend((c, False) for o in n.children for c in o.children)
            continue
        done[id(n)] = _prune_node(n, done)
    return done[id(root)]


def _prune_node(n: AndNode, done: dict) -> tuple[bool, bool]:
    closed = not n.open
    live_ors = []
    for o in n.children:
        dead_or = False
        new_kids = []
        for c in o.children:
            c_dead, c_closed = done.pop(id(c))
            if c_dead:
                dead_or = True
                break
            closed = closed and c_closed
            if (not c.open and c.proof is None and len(c.children) == 1
                    and c.children[0].children):
                new_kids.extend(c.children[0].children)
            else:
                new_kids.append(c)
        if dead_or:
            continue
        o.children = new_kids
        live_ors.append(o)
    n.children = live_ors
    if not n.children and not n.open:
        return True, True
    if closed:
        w = success_witness(n)
        if w is not None:
            n.children = [OrNode([], w.children[0].clause if w.children else -1)]
            n.proof = w
    return False, closed


# -- derivations ------------------------------------------------------------


@dataclass
class DerivationState:
    tree: CoTree
    chain: tuple[Subst, ...] = ()
    rank: int = 0
    goal: Optional[Atom] = None
    witness: Optional[AndNode] = field(default=None, compare=False)
    open: bool = True

    @property
    def step_count(self) -> int:
        return len(self.chain)

    @property
    def total_sub_length(self) -> int:
        return self.rank

    def answer(self) -> Subst:
        g = self.goal if self.goal is not None else self.tree.goal
        return compose_all(self.chain).restrict(vars_of(g))


@dataclass
class StepConfig:
    budget: int = DEFAULT_BUDGET
    expansion_threads: int = 1
    prune: bool = True
    occurs_check: bool = True
    observer: object = None  # called as observer(head, atom, bindings) on every fired match


def initial_state(store: TemplateStore, goal: Atom,
                  cfg: Optional[StepConfig] = None,
                  executor: Optional[ThreadPoolExecutor] = None) -> DerivationState:
    cfg = cfg or StepConfig()
    bc = BuildConfig(budget=cfg.budget, expansion_threads=cfg.expansion_threads,
                     occurs_check=cfg.occurs_check, observer=cfg.observer)
    tree = build_cotree(store, goal, cfg=bc, executor=executor)
    return _finish(DerivationState(tree, (), 0, goal), cfg)


def _finish(st: DerivationState, cfg: StepConfig) -> DerivationState:
    st.witness = success_witness(st.tree.root)
    if cfg.prune:
        prune_and_compact(st.tree)
    st.open = has_open(st.tree.root)
    return st


def derive_step(state: DerivationState, store: TemplateStore,
                cfg: Optional[StepConfig] = None,
                executor: Optional[ThreadPoolExecutor] = None) -> list[DerivationState]:
    """One coinductive derivation step on the first open node (breadth-first).

    Each distinct mgu of that node against its open refs yields one
    successor: the mgu is applied to a copy of the whole tree, which is then
    re-expanded.  With a single mgu the tree is reused without copying.
    """
    cfg = cfg or StepConfig()
    opens = find_open_nodes(state.tree, store, cfg.occurs_check, first_only=True)
    if not opens:
        return []
    out = []
    single = len(opens) == 1
    bc = BuildConfig(budget=cfg.budget, expansion_threads=cfg.expansion_threads,
                     occurs_check=cfg.occurs_check, observer=cfg.observer)
    own = executor is None and cfg.expansion_threads > 1
    ex = _with_executor(cfg.expansion_threads) if own else executor
    try:
        for op in opens:
            theta = op.mgu
            tree = state.tree if single else state.tree.copy()
            apply_to_tree(tree.root, theta)
            work = [n for _, n in iter_and_nodes(tree.root) if n.open]
            nodes = count_nodes(tree.root)[0]
            exp = _expander(store, COINDUCTIVE, bc, nodes, tree.next_var + 1, ex)
            exp.run(work, tree.root)
            new_tree = CoTree(tree.root, state.tree.goal,
                              tree.truncated or exp.truncated, exp.next_var)
            st = DerivationState(
                new_tree, state.chain + (theta,), state.rank + len(theta),
                state.goal if state.goal is not None else state.tree.goal,
            )
            out.append(_finish(st, cfg))
    finally:
        if own:
            ex.shutdown()
    return out


def current_atom(state: DerivationState) -> Atom:
    return state.tree.root.atom
