"""First-order terms, atoms, clauses and substitutions.

Everything here is immutable once built, so values can be shared freely
between threads and pickled to worker processes.

Variables are identified by ``(name, index)``.  Index 0 is a variable as
written in the source program or goal; positive indices are produced by
renaming apart.  The compiled clause templates keep their variables in a
private namespace (``TEMPLATE_INDEX``) that never occurs inside a runtime
tree, which is what lets the engines match and unify against templates
without renaming them first.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Mapping, Optional, Union

TEMPLATE_INDEX = -1

_PLAIN_NAME = re.compile(r"[a-z][A-Za-z0-9_]*\Z|[0-9]+\Z")
_FUNCTOR_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def _quote(name: str, arity: int) -> str:
    if _PLAIN_NAME.match(name) or (arity > 0 and _FUNCTOR_NAME.match(name)):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


class Var:
    __slots__ = ("name", "index", "_hash")

    ground = False

    def __init__(self, name: str, index: int = 0):
        self.name = name
        self.index = index
        self._hash = hash((name, index))

    def __eq__(self, other):
        return (
            other.__class__ is Var
            and self.index == other.index
            and self.name == other.name
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Var, (self.name, self.index))

    def __repr__(self):
        return f"Var({self.name!r}, {self.index})"

    def __str__(self):
        if self.index > 0:
            return f"{self.name}_{self.index}"
        return self.name


class Struct:
    """A compound term; constants are structs with no arguments."""

    __slots__ = ("functor", "args", "ground", "_hash")

    def __init__(self, functor: str, args: Iterable["Term"] = ()):
        self.functor = functor
        self.args = tuple(args)
        self.ground = all(a.ground for a in self.args)
        self._hash = hash((functor, self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __eq__(self, other):
        if self is other:
            return True
        return (
            other.__class__ is Struct
            and self._hash == other._hash
            and self.functor == other.functor
            and self.args == other.args
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Struct, (self.functor, self.args))

    def __repr__(self):
        return f"Struct({self.functor!r}, {self.args!r})"

    def __str__(self):
        name = _quote(self.functor, len(self.args))
        if not self.args:
            return name
        return f"{name}({','.join(map(str, self.args))})"


Term = Union[Var, Struct]


class Atom:
    """An atomic formula ``pred(t1, ..., tn)``."""

    __slots__ = ("pred", "args", "ground", "_hash")

    def __init__(self, pred: str, args: Iterable[Term] = ()):
        self.pred = pred
        self.args = tuple(args)
        self.ground = all(a.ground for a in self.args)
        self._hash = hash(("atom", pred, self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def signature(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            other.__class__ is Atom
            and self._hash == other._hash
            and self.pred == other.pred
            and self.args == other.args
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Atom, (self.pred, self.args))

    def __repr__(self):
        return f"Atom({self.pred!r}, {self.args!r})"

    def __str__(self):
        name = _quote(self.pred, len(self.args))
        if not self.args:
            return name
        return f"{name}({','.join(map(str, self.args))})"


class Clause:
    __slots__ = ("head", "body")

    def __init__(self, head: Atom, body: Iterable[Atom] = ()):
        self.head = head
        self.body = tuple(body)

    @property
    def is_unit(self) -> bool:
        return not self.body

    @property
    def ground(self) -> bool:
        return self.head.ground and all(b.ground for b in self.body)

    def __eq__(self, other):
        return (
            isinstance(other, Clause)
            and self.head == other.head
            and self.body == other.body
        )

    def __hash__(self):
        return hash((self.head, self.body))

    def __reduce__(self):
        return (Clause, (self.head, self.body))

    def __repr__(self):
        return f"Clause({self.head!r}, {self.body!r})"

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(map(str, self.body))}."


class Goal:
    """A conjunction of atoms; the empty goal is the success marker."""

    __slots__ = ("atoms",)

    def __init__(self, atoms: Iterable[Atom] = ()):
        self.atoms = tuple(atoms)

    @property
    def is_empty(self) -> bool:
        return not self.atoms

    def single(self) -> Atom:
        """The goal's only atom; the derivation engines work on atomic goals."""
        if len(self.atoms) != 1:
            raise GoalError(
                f"expected a single-atom goal, got {len(self.atoms)} atoms"
            )
        return self.atoms[0]

    def __eq__(self, other):
        return isinstance(other, Goal) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        return f"Goal({self.atoms!r})"

    def __str__(self):
        if not self.atoms:
            return "[]"
        return "?- " + ", ".join(map(str, self.atoms)) + "."


class GoalError(ValueError):
    pass


def const(name: str) -> Struct:
    return Struct(name)


# -- traversal helpers -------------------------------------------------------


def term_vars(t, acc: Optional[dict] = None) -> dict:
    """Variables of a term/atom in order of first occurrence (dict as ordered set)."""
    if acc is None:
        acc = {}
    stack = [t]
    while stack:
        x = stack.pop()
        if x.__class__ is Var:
            acc.setdefault(x, None)
        elif not x.ground:
            stack.extend(reversed(x.args))
    return acc


def vars_of(x) -> list[Var]:
    """Variables of a term, atom, goal or clause, first-occurrence order."""
    acc: dict = {}
    if isinstance(x, Clause):
        term_vars(x.head, acc)
        for b in x.body:
            term_vars(b, acc)
    elif isinstance(x, Goal):
        for a in x.atoms:
            term_vars(a, acc)
    else:
        term_vars(x, acc)
    return list(acc)


def is_ground(x) -> bool:
    if isinstance(x, Clause):
        return x.ground
    if isinstance(x, Goal):
        return all(a.ground for a in x.atoms)
    return x.ground


def term_size(t) -> int:
    if t.__class__ is Var:
        return 1
    return 1 + sum(term_size(a) for a in t.args)


def term_depth(t) -> int:
    if t.__class__ is Var or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def occurs_in(v: Var, t) -> bool:
    if t.__class__ is Var:
        return t == v
    if t.ground:
        return False
    return any(occurs_in(v, a) for a in t.args)


def term_key(t):
    """Sort key of the engine-wide deterministic order.

    Variables sort before compound terms; compounds compare by functor
    name, then arity, then arguments left to right.  Atoms use the same
    scheme with the predicate in place of the functor.
    """
    if t.__class__ is Var:
        return (0, t.name, t.index)
    return (1, getattr(t, "functor", None) or getattr(t, "pred", ""), len(t.args),
            tuple(term_key(a) for a in t.args))


def frontier(t) -> list:
    """Left-to-right sequence of the leaves (constants and variables) of a term."""
    out: list = []
    stack = [t]
    while stack:
        x = stack.pop()
        if x.__class__ is Var or not x.args:
            out.append(x)
        else:
            stack.extend(reversed(x.args))
    return out


def rtl_key(t):
    """Like ``term_key`` but comparing arguments from the right."""
    if t.__class__ is Var:
        return (0, t.name, t.index)
    return (1, getattr(t, "functor", None) or getattr(t, "pred", ""), len(t.args),
            tuple(rtl_key(a) for a in reversed(t.args)))


# -- substitutions -----------------------------------------------------------


def _subst_term(t, b: Mapping):
    if t.ground:
        return t
    if t.__class__ is Var:
        return b.get(t, t)
    args = t.args
    new = tuple(_subst_term(a, b) for a in args)
    if all(x is y for x, y in zip(new, args)):
        return t
    return Struct(t.functor, new)


def _subst_atom(a: Atom, b: Mapping) -> Atom:
    if a.ground or not b:
        return a
    new = tuple(_subst_term(x, b) for x in a.args)
    if all(x is y for x, y in zip(new, a.args)):
        return a
    return Atom(a.pred, new)


class Subst:
    """A finite substitution, stored normalised (fully applied to its range).

    ``len(s)`` is the number of bindings, which is the substitution length
    used to rank derivations.
    """

    __slots__ = ("_b",)

    def __init__(self, bindings: Optional[Mapping[Var, Term]] = None):
        b = {}
        if bindings:
            for v, t in bindings.items():
                if t != v:
                    b[v] = t
        self._b = b

    @classmethod
    def _raw(cls, b: dict) -> "Subst":
        s = cls.__new__(cls)
        s._b = b
        return s

    @property
    def bindings(self) -> Mapping[Var, Term]:
        return self._b

    def __len__(self):
        return len(self._b)

    def __bool__(self):
        return bool(self._b)

    def __contains__(self, v):
        return v in self._b

    def __getitem__(self, v):
        return self._b[v]

    def get(self, v, default=None):
        return self._b.get(v, default)

    def items(self):
        return self._b.items()

    def domain(self) -> set[Var]:
        return set(self._b)

    def __iter__(self) -> Iterator[Var]:
        return iter(self._b)

    def __eq__(self, other):
        return isinstance(other, Subst) and self._b == other._b

    def __hash__(self):
        return hash(frozenset(self._b.items()))

    def __reduce__(self):
        return (Subst._raw, (self._b,))

    def __repr__(self):
        return f"Subst({self})"

    def __str__(self):
        if not self._b:
            return "{}"
        items = sorted(self._b.items(), key=lambda kv: term_key(kv[0]))
        return "{" + ", ".join(f"{v}/{t}" for v, t in items) + "}"

    def key(self):
        return tuple(sorted((term_key(v), term_key(t)) for v, t in self._b.items()))

    def __call__(self, x):
        return apply(self, x)

    def restrict(self, keep: Iterable[Var]) -> "Subst":
        keep = set(keep)
        return Subst._raw({v: t for v, t in self._b.items() if v in keep})

    def is_idempotent(self) -> bool:
        dom = self._b.keys()
        return not any(v in dom for t in self._b.values() for v in vars_of(t))


EMPTY = Subst()


def apply(s: Subst | Mapping, x):
    """Simultaneously replace bound variables in a term, atom, goal or clause."""
    b = s._b if isinstance(s, Subst) else s
    if not b:
        return x
    cls = x.__class__
    if cls is Var or cls is Struct:
        return _subst_term(x, b)
    if cls is Atom:
        return _subst_atom(x, b)
    if cls is Goal:
        return Goal(_subst_atom(a, b) for a in x.atoms)
    if cls is Clause:
        return Clause(_subst_atom(x.head, b), (_subst_atom(a, b) for a in x.body))
    if isinstance(x, (list, tuple)):
        return type(x)(apply(s, y) for y in x)
    raise TypeError(f"cannot apply a substitution to {type(x).__name__}")


def compose(s1: Subst, s2: Subst) -> Subst:
    """Composition such that ``apply(compose(s1, s2), t) == apply(s2, apply(s1, t))``."""
    b2 = s2._b
    out = {}
    for v, t in s1._b.items():
        t2 = _subst_term(t, b2) if b2 else t
        if t2 != v:
            out[v] = t2
    for v, t in b2.items():
        if v not in s1._b:
            out[v] = t
    return Subst._raw(out)


def compose_all(subs: Iterable[Subst]) -> Subst:
    acc = EMPTY
    for s in subs:
        acc = compose(acc, s)
    return acc


# -- unification and matching -------------------------------------------------


def _walk(t, b):
    while t.__class__ is Var:
        nxt = b.get(t)
        if nxt is None:
            return t
        t = nxt
    return t


def _occurs(v: Var, t, b) -> bool:
    stack = [t]
    while stack:
        x = _walk(stack.pop(), b)
        if x.__class__ is Var:
            if x == v:
                return True
        elif not x.ground:
            stack.extend(x.args)
    return False


def _resolve(t, b, active=frozenset()):
    # ``active`` guards against cyclic bindings, possible without the occurs check
    while t.__class__ is Var:
        nxt = b.get(t)
        if nxt is None or t in active:
            return t
        active = active | {t}
        t = nxt
    if t.ground:
        return t
    return Struct(t.functor, tuple(_resolve(a, b, active) for a in t.args))


def _unify_into(pairs: list, b: dict, occurs_check: bool) -> bool:
    while pairs:
        x, y = pairs.pop()
        x = _walk(x, b)
        y = _walk(y, b)
        if x is y:
            continue
        xv = x.__class__ is Var
        yv = y.__class__ is Var
        if xv and yv:
            if x == y:
                continue
            # template-space variables are bound in preference; otherwise the
            # right-hand variable is bound to the left-hand one
            if x.index == TEMPLATE_INDEX and y.index != TEMPLATE_INDEX:
                b[x] = y
            else:
                b[y] = x
        elif xv:
            if occurs_check and not y.ground and _occurs(x, y, b):
                return False
            b[x] = y
        elif yv:
            if occurs_check and not x.ground and _occurs(y, x, b):
                return False
            b[y] = x
        else:
            if x.functor != y.functor or len(x.args) != len(y.args):
                return False
            if x.ground and y.ground:
                if x != y:
                    return False
                continue
            pairs.extend(zip(x.args, y.args))
    return True


def unify(a, b, occurs_check: bool = True) -> Optional[Subst]:
    """Most general unifier of two atoms (or terms), normalised; ``None`` if none exists.

    >>> X = Var("X")
    >>> str(unify(Atom("bit", [X]), Atom("bit", [Struct("0")])))
    '{X/0}'
    """
    if a.__class__ is Atom or b.__class__ is Atom:
        if a.__class__ is not b.__class__:
            return None
        if a.pred != b.pred or len(a.args) != len(b.args):
            return None
        if a.ground and b.ground:
            return EMPTY if a == b else None
        pairs = list(zip(a.args, b.args))
    else:
        pairs = [(a, b)]
    bind: dict = {}
    if not _unify_into(pairs, bind, occurs_check):
        return None
    return Subst._raw({v: _resolve(t, bind) for v, t in bind.items()})


def unifiable(a, b, occurs_check: bool = True) -> bool:
    if a.__class__ is Atom:
        if b.__class__ is not Atom or a.pred != b.pred or len(a.args) != len(b.args):
            return False
        if a.ground and b.ground:
            return a == b
        pairs = list(zip(a.args, b.args))
    else:
        pairs = [(a, b)]
    return _unify_into(pairs, {}, occurs_check)


def _match_into(p, t, b: dict) -> bool:
    stack = [(p, t)]
    while stack:
        p, t = stack.pop()
        if p.__class__ is Var:
            bound = b.get(p)
            if bound is None:
                b[p] = t
            elif bound != t:
                return False
        elif p.ground:
            if p != t:
                return False
        else:
            if (t.__class__ is not Struct or t.functor != p.functor
                    or len(t.args) != len(p.args)):
                return False
            stack.extend(zip(p.args, t.args))
    return True


def match_bindings(pattern, target) -> Optional[dict]:
    """Raw matcher as a dict (identity bindings included); ``None`` on failure."""
    if pattern.__class__ is Atom:
        if (target.__class__ is not Atom or pattern.pred != target.pred
                or len(pattern.args) != len(target.args)):
            return None
        if pattern.ground:
            return {} if pattern == target else None
        b: dict = {}
        if _match_into_args(pattern.args, target.args, b):
            return b
        return None
    b = {}
    return b if _match_into(pattern, target, b) else None


def _match_into_args(ps, ts, b) -> bool:
    for p, t in zip(ps, ts):
        if not _match_into(p, t, b):
            return False
    return True


def term_match(pattern, target) -> Optional[Subst]:
    """One-way matcher: ``theta`` over ``vars(pattern)`` with ``apply(theta, pattern) == target``.

    The target is never instantiated.  Variables shared by pattern and
    target are treated as the same variable, so identity bindings vanish.
    """
    b = match_bindings(pattern, target)
    if b is None:
        return None
    return Subst(b)


def standardise_apart(c: Clause, taken: Iterable[Var]) -> Clause:
    """Rename the clause's variables so they are disjoint from ``taken``.

    Every variable keeps its name and receives the index one above the
    largest index in ``taken`` (and in the clause itself), so the result is a
    deterministic function of the inputs.
    """
    cvars = vars_of(c)
    if not cvars:
        return c
    top = max((v.index for v in taken), default=0)
    top = max(top, max(v.index for v in cvars))
    k = top + 1
    return apply(Subst._raw({v: Var(v.name, k) for v in cvars}), c)


def rename_index(x, index: int):
    """Give every variable of ``x`` the rename-index ``index``."""
    vs = vars_of(x)
    if not vs:
        return x
    return apply(Subst._raw({v: Var(v.name, index) for v in vs}), x)


def is_regular_strict(c: Clause) -> bool:
    """Body variables form a proper subset of head variables."""
    head = set(vars_of(c.head))
    body = set(v for b in c.body for v in vars_of(b))
    return body < head


def is_regular_weak(c: Clause) -> bool:
    """Body variables are contained in head variables."""
    head = set(vars_of(c.head))
    body = set(v for b in c.body for v in vars_of(b))
    return body <= head


def is_variant(x, y) -> bool:
    """True when ``x`` and ``y`` are equal up to a bijective renaming of variables."""
    m1 = match_bindings(x, y)
    m2 = match_bindings(y, x)
    if m1 is None or m2 is None:
        return False
    return all(t.__class__ is Var for t in m1.values()) and len(set(m1.values())) == len(m1)
