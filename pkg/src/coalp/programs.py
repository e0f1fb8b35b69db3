"""Small reference programs used by tests, examples and the CLI."""

BINARY_TREE = """\
bit(0).
bit(1).
btree(empty).
btree(tree(L,X,R)) :- btree(L), bit(X), btree(R).
"""

BTG = """\
bit(0).
bit(1).
btree(empty).
btree(tree(empty,0,empty)) :- btree(empty), bit(0), btree(empty).
btree(tree(empty,1,empty)) :- btree(empty), bit(1), btree(empty).
"""

TQ = """\
T(X,c) :- Q(X).
Q(X) :- P(X).
Q(a).
P(b) :- P(X).
"""

TTREE = """\
ttree(0).
ttree(s(X)) :- ttree(X), ttree(X), ttree(X).
"""

BUILTIN = {
    "binarytree": BINARY_TREE,
    "btg": BTG,
    "tq": TQ,
    "ttree": TTREE,
}


def ttree_goal(i: int) -> str:
    """Text of the goal ``ttree(s(...s(0)...))`` with ``i`` nested ``s``."""
    return "ttree(" + "s(" * i + "0" + ")" * i + ")."
