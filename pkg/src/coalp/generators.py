"""Program generators: balanced (BTA) and unbalanced (UTA) tree programs, random ground Datalog."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .parser import Program
from .terms import Atom, Clause, Struct, term_key

EMPTY = Struct("empty")
BITS = (Struct("0"), Struct("1"))

# guard against the doubly exponential growth of both algorithms
DEFAULT_TERM_LIMIT = 200_000


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("bta", "uta", "datalog"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.n < 0:
            raise ValueError("n must be non-negative")


def _tree(l, b, r) -> Struct:
    return Struct("tree", (l, b, r))


def _leaves():
    return [_tree(EMPTY, b, EMPTY) for b in BITS]


def _grow(trees: list) -> list:
    return [_tree(t1, b, t2) for t1 in trees for t2 in trees for b in BITS]


def _check(n: int, predicted: int, limit: int):
    if n < 0:
        raise ValueError("n must be non-negative")
    if predicted > limit:
        raise ValueError(
            f"n={n} would create about {predicted} trees, above the limit of {limit}"
        )


def bta_terms(n: int, limit: int = DEFAULT_TERM_LIMIT) -> list[Struct]:
    """The ``result`` set of the balanced-tree algorithm after ``n`` iterations, in creation order."""
    _check(n, 0, limit)
    size = 2
    for _ in range(n):
        size = 2 * size * size
        _check(n, size, limit)
    trees = _leaves()
    result = [EMPTY] + trees
    seen = set(result)
    for _ in range(n):
        new = list(dict.fromkeys(_grow(trees)))
        result.extend(t for t in new if t not in seen)
        seen.update(new)
        trees = new
    return result


def uta_terms(n: int, limit: int = DEFAULT_TERM_LIMIT) -> list[Struct]:
    """The ``trees`` set of the unbalanced-tree algorithm after ``n`` iterations, in creation order."""
    _check(n, 0, limit)
    trees = [EMPTY] + _leaves()
    for _ in range(n):
        _check(n, 2 * len(trees) ** 2, limit)
        seen = set(trees)
        trees = trees + [t for t in dict.fromkeys(_grow(trees)) if t not in seen]
    return trees


def tree_depth(t: Struct) -> int:
    """Levels of ``tree`` constructors: ``empty`` has depth 0, ``tree(empty,0,empty)`` depth 1."""
    if t.functor != "tree":
        return 0
    return 1 + max(tree_depth(t.args[0]), tree_depth(t.args[2]))


def tree_program(terms: Iterable[Struct]) -> Program:
    """Ground program in the style of the small BTG example.

    Bit facts first, then ``btree(empty).``, then one rule per composite tree::

        btree(tree(L,B,R)) :- btree(L), bit(B), btree(R).   (instantiated)
    """
    clauses = [Clause(Atom("bit", (b,))) for b in BITS]
    for t in terms:
        if t == EMPTY:
            clauses.append(Clause(Atom("btree", (EMPTY,))))
        else:
            l, b, r = t.args
            clauses.append(Clause(
                Atom("btree", (t,)),
                (Atom("btree", (l,)), Atom("bit", (b,)), Atom("btree", (r,))),
            ))
    return Program(clauses)


def generate_bta(n: int, limit: int = DEFAULT_TERM_LIMIT) -> Program:
    return tree_program(bta_terms(n, limit))


def generate_uta(n: int, limit: int = DEFAULT_TERM_LIMIT) -> Program:
    return tree_program(uta_terms(n, limit))


def depth_layers(p: Program) -> Counter:
    """Number of ``btree`` clause heads per tree depth."""
    out: Counter = Counter()
    for c in p.clauses:
        if c.head.pred == "btree":
            out[tree_depth(c.head.args[0])] += 1
    return out


def bta_layer_formula(n: int) -> int:
    return 2 ** (2 ** n - 1)


def uta_layer_formula(n: int) -> float:
    # exact for integer exponents; fractional below n = 3
    return 3 * 6.0 ** (2 * n - 3) - 3 * 6.0 ** (2 * n - 5)


def generate_datalog(seed: int, clauses: int = 30, predicates: int = 4,
                     constants: int = 4, max_body: int = 3,
                     fact_ratio: float = 0.35) -> Program:
    """Seeded random ground Datalog program.

    Atoms are ``p<i>(c<j>)``.  The atoms are put in a random order and each
    rule body draws only from atoms earlier in that order, so every program
    is well-founded and its derivation trees are finite.  No two clauses
    share both head and body multiset.
    """
    if clauses < 0 or predicates < 1 or constants < 1 or max_body < 0:
        raise ValueError("invalid datalog generator parameters")
    rng = random.Random(seed)
    atoms = [Atom(f"p{i}", (Struct(f"c{j}"),))
             for i in range(predicates) for j in range(constants)]
    rng.shuffle(atoms)
    seen = set()
    out = []
    attempts = 0
    while len(out) < clauses and attempts < clauses * 50:
        attempts += 1
        h = rng.randrange(len(atoms))
        if h == 0 or rng.random() < fact_ratio or max_body == 0:
            body: tuple = ()
        else:
            k = rng.randint(1, max_body)
            body = tuple(atoms[rng.randrange(h)] for _ in range(k))
        key = (atoms[h], tuple(sorted(body, key=term_key)))
        if key in seen:
            continue
        seen.add(key)
        out.append(Clause(atoms[h], body))
    return Program(out)


def generate(spec: GenSpec, **kw) -> Program:
    if spec.kind == "bta":
        return generate_bta(spec.n, **kw)
    if spec.kind == "uta":
        return generate_uta(spec.n, **kw)
    return generate_datalog(spec.seed, **kw)
