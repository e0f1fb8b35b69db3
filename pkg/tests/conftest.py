import pytest

from coalp import compile_program, parse_atom, parse_program
from coalp.programs import BINARY_TREE, BTG, TQ, TTREE


@pytest.fixture(scope="session")
def bt():
    return compile_program(parse_program(BINARY_TREE))


@pytest.fixture(scope="session")
def btg():
    return compile_program(parse_program(BTG))


@pytest.fixture(scope="session")
def tq():
    return compile_program(parse_program(TQ))


@pytest.fixture(scope="session")
def ttree():
    return compile_program(parse_program(TTREE))


def A(text):
    return parse_atom(text)
