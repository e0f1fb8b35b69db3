"""Parallel coalgebraic logic programming: clause trees, and-or trees,
coinductive trees and breadth-first coinductive derivation search."""

from .clausetree import (
    AndNode, ExpansionBudget, ModeError, OrNode, TemplateStore, compile_program,
    roots_unifying, success_witness,
)
from .cotree import (
    CoTree, DerivationState, build_cotree, derive_step, find_open_nodes,
    initial_state, prune_and_compact,
)
from .ground import (
    CoalgebraMap, GroundTree, PnTree, build_ground_tree, coalgebra_of,
    has_success_subtree_ground, pn_tree, stable_pn_tree,
)
from .parser import (
    ParseDiagnostic, ParseError, Program, parse_atom, parse_goal, parse_program,
)
from .search import SearchConfig, SearchRun, Solution, search
from .terms import (
    Atom, Clause, Goal, Struct, Subst, Var, apply, compose, standardise_apart,
    term_match, unify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
