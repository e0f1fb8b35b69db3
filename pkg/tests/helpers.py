"""Test-side oracles, kept apart from the package code they check."""

from coalp.terms import Atom, Struct, Var, apply, match_bindings, vars_of


def alpha_canonical(root, ordered=True):
    """Canonical form with every variable renamed by breadth-first first appearance."""
    names = {}
    order = []
    q = [root]
    while q:
        n = q.pop(0)
        order.append(n)
        for o in n.children:
            q.extend(o.children)
    for n in order:
        for v in vars_of(n.atom):
            names.setdefault(v, Var(f"V{len(names)}"))

    def and_c(n):
        ors = [tuple(and_c(c) for c in o.children) for o in n.children]
        if not ordered:
            ors = sorted(tuple(sorted(x)) for x in ors)
        return (str(apply(names, n.atom)), tuple(ors))

    return and_c(root)


def more_general(s, t, vs):
    """True when the images of ``vs`` under ``t`` are an instance of those under ``s``."""
    a = Atom("v", tuple(apply(s, v) for v in vs))
    b = Atom("v", tuple(apply(t, v) for v in vs))
    return match_bindings(a, b) is not None


def textbook_unify(a, b):
    """Robinson's algorithm on an explicit disagreement list; returns a dict or None."""
    sub = {}

    def walk(t):
        while isinstance(t, Var) and t in sub:
            t = sub[t]
        return t

    def occurs(v, t):
        t = walk(t)
        if isinstance(t, Var):
            return t == v
        return any(occurs(v, x) for x in t.args)

    todo = [(a, b)]
    while todo:
        x, y = todo.pop()
        x, y = walk(x), walk(y)
        if isinstance(x, Var) and isinstance(y, Var) and x == y:
            continue
        if isinstance(x, Var):
            if occurs(x, y):
                return None
            sub[x] = y
        elif isinstance(y, Var):
            if occurs(y, x):
                return None
            sub[y] = x
        else:
            fx = x.pred if isinstance(x, Atom) else x.functor
            fy = y.pred if isinstance(y, Atom) else y.functor
            if type(x) is not type(y) or fx != fy or len(x.args) != len(y.args):
                return None
            todo.extend(zip(x.args, y.args))

    def full(t):
        t = walk(t)
        if isinstance(t, Var):
            return t
        return Struct(t.functor, tuple(full(x) for x in t.args))

    return {v: full(v) for v in sub}


def naive_cotree(program, goal, max_depth=40):
    """Coinductive tree straight from the definition.

    For every node, scan all clauses in order; each clause whose renamed head
    term-matches the node's atom contributes an or-child whose and-children
    are the instantiated body.  Body-only variables get a fresh index per
    use.  Returns nested ``(atom, [[child, ...], ...])`` tuples wrapped in
    light node objects that ``alpha_canonical`` accepts.
    """
    counter = [1000]

    class N:
        def __init__(self, atom):
            self.atom = atom
            self.children = []

    class O:
        def __init__(self, kids):
            self.children = kids

    def build(atom, depth):
        n = N(atom)
        if depth >= max_depth:
            raise RecursionError("naive tree too deep")
        for c in program.clauses:
            counter[0] += 1
            k = counter[0]
            ren = {v: Var(v.name, k) for v in vars_of(c)}
            head = apply(ren, c.head)
            m = match_bindings(head, atom)
            if m is None:
                continue
            body = [apply(m, apply(ren, b)) for b in c.body]
            n.children.append(O([build(b, depth + 1) for b in body]))
        return n

    return build(goal, 0)
