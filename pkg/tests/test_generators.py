import pytest

from coalp.clausetree import compile_program
from coalp.generators import (
    GenSpec, bta_layer_formula, bta_terms, depth_layers, generate,
    generate_bta, generate_datalog, generate_uta, tree_depth, uta_layer_formula,
    uta_terms,
)
from coalp.ground import build_ground_tree, has_success_subtree_ground
from coalp.parser import parse_program
from coalp.terms import Atom, Struct


def _height_at_most(h):
    """Number of bit-labelled binary trees of height <= h (independent recurrence)."""
    n = 1
    for _ in range(h):
        n = 1 + 2 * n * n
    return n


def _balanced(h):
    """Number of perfectly balanced trees of height exactly h."""
    return 1 if h == 0 else 2 * _balanced(h - 1) ** 2


def test_bta_initial_program():
    p = generate_bta(0)
    heads = [c.head for c in p.clauses]
    assert sum(h.pred == "bit" for h in heads) == 2
    assert sum(h.pred == "btree" for h in heads) == 3
    assert str(p).splitlines()[3] == "btree(tree(empty,0,empty)) :- btree(empty), bit(0), btree(empty)."


def test_bta_first_iteration_adds_eight():
    assert len(generate_bta(1)) - len(generate_bta(0)) == 8
    assert len(bta_terms(1)) == 3 + 8


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bta_layers(n):
    layers = depth_layers(generate_bta(n - 1)) if n > 1 else depth_layers(generate_bta(0))
    assert layers[n] == bta_layer_formula(n) == _balanced(n)


def test_bta_depth_three():
    assert depth_layers(generate_bta(2))[3] == 128


def test_uta_initial_and_layers():
    assert len(uta_terms(0)) == 3
    layers = depth_layers(generate_uta(2))
    for h in range(4):
        assert layers[h] == _height_at_most(h) - (_height_at_most(h - 1) if h else 0)
    assert layers[3] == 704


def test_uta_formula_is_fractional_below_three():
    assert uta_layer_formula(3) == 630
    assert uta_layer_formula(2) != int(uta_layer_formula(2))


def test_resource_guard():
    with pytest.raises(ValueError):
        bta_terms(4)
    with pytest.raises(ValueError):
        uta_terms(3)
    with pytest.raises(ValueError):
        bta_terms(-1)
    assert len(bta_terms(3, limit=10**7)) == 3 + 8 + 128 + 2 * 128 * 128


@pytest.mark.parametrize("make", [lambda: generate_bta(2), lambda: generate_uta(1),
                                  lambda: generate_datalog(4, clauses=40)])
def test_generated_programs_parse_and_are_ground(make):
    p = make()
    again = parse_program(str(p))
    assert again.clauses == p.clauses and again.ground
    assert len(compile_program(again)) == len(p)


def test_every_generated_tree_is_provable():
    store = compile_program(generate_bta(1))
    for t in bta_terms(1):
        ok, _ = has_success_subtree_ground(build_ground_tree(store, Atom("btree", (t,))))
        assert ok


def test_tree_depth():
    e = Struct("empty")
    leaf = Struct("tree", (e, Struct("0"), e))
    assert tree_depth(e) == 0 and tree_depth(leaf) == 1
    assert tree_depth(Struct("tree", (leaf, Struct("1"), e))) == 2


def test_datalog_generator():
    a, b = generate_datalog(7), generate_datalog(7)
    assert a.clauses == b.clauses
    assert generate_datalog(8).clauses != a.clauses
    assert len(a) == 30
    keys = {(c.head, tuple(sorted(map(str, c.body)))) for c in a.clauses}
    assert len(keys) == len(a)
    assert all(len(c.body) <= 3 for c in a.clauses)
    with pytest.raises(ValueError):
        generate_datalog(1, predicates=0)


def test_datalog_is_well_founded():
    for seed in range(10):
        p = generate_datalog(seed, clauses=50)
        store = compile_program(p)
        for c in p.clauses:
            assert not build_ground_tree(store, c.head, budget=200_000).truncated


def test_genspec():
    assert generate(GenSpec("bta", 1)).clauses == generate_bta(1).clauses
    assert generate(GenSpec("datalog", seed=3)).clauses == generate_datalog(3).clauses
    with pytest.raises(ValueError):
        GenSpec("other")
    with pytest.raises(ValueError):
        GenSpec("bta", -1)
