"""Plane tree enumeration, serialization, and energies."""

import math

import numpy as np
import pytest

from treegibbs.errors import DomainError, ResourceLimitError
from treegibbs.model import EnergyModel
from treegibbs.trees import (
    degree_counts,
    enumerate_trees,
    parse_tree,
    serialize_tree,
    tree_energy,
    tree_height,
    tree_order,
)


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def walk_energy(tree, E):
    """Independent per-vertex walk oracle for the tree energy."""
    return E[len(tree)] + sum(walk_energy(c, E) for c in tree)


def test_five_trees_of_order_four():
    assert sum(1 for _ in enumerate_trees(4, 3)) == 5


def test_single_path_when_degree_capped_at_one():
    trees = list(enumerate_trees(4, 1))
    assert len(trees) == 1
    assert serialize_tree(trees[0]) == "(((())))"


def test_catalan_counts_unbounded_degree():
    for N in range(1, 11):
        assert sum(1 for _ in enumerate_trees(N, max(N - 1, 1))) == catalan(N - 1)


def test_canonical_order_frozen():
    assert [serialize_tree(t) for t in enumerate_trees(4, 3)] == [
        "(((())))",
        "((()()))",
        "(()(()))",
        "((())())",
        "(()()())",
    ]


def test_enumeration_guards():
    with pytest.raises(ResourceLimitError):
        next(enumerate_trees(17, 3))
    with pytest.raises(DomainError):
        next(enumerate_trees(0, 3))


def test_serialize_parse_roundtrip():
    for tree in enumerate_trees(7, 6):
        assert parse_tree(serialize_tree(tree)) == tree
    for bad in ["", "(", "())", "()()", "(()"]:
        with pytest.raises(DomainError):
            parse_tree(bad)


def test_tree_energy_path_and_star():
    path4 = parse_tree("(((())))")
    model = EnergyModel(D=2, E=(5.0, 7.0, 0.0), beta=1.0)
    assert tree_energy(path4, model) == 3 * 7.0 + 5.0
    star4 = parse_tree("(()()())")
    model3 = EnergyModel(D=3, E=(0.0, 0.0, 0.0, 1.0), beta=1.0)
    assert tree_energy(star4, model3) == 1.0


def test_tree_energy_matches_vertex_walk():
    rng = np.random.default_rng(5)
    model = EnergyModel(D=4, E=tuple(rng.uniform(-2, 2, size=5)), beta=0.3)
    for tree in enumerate_trees(8, 4):
        assert abs(tree_energy(tree, model) - walk_energy(tree, model.E)) < 1e-12


def test_degree_counts_identities():
    for N in (1, 4, 7):
        for tree in enumerate_trees(N, 3):
            chi = degree_counts(tree, 3)
            assert chi.sum() == N == tree_order(tree)
            assert np.dot(np.arange(4), chi) == N - 1


def test_degree_overflow_raises():
    star = parse_tree("(()()())")
    with pytest.raises(DomainError):
        degree_counts(star, 2)
    with pytest.raises(DomainError):
        tree_energy(star, EnergyModel(D=2, E=(0.0, 0.0, 0.0), beta=0.0))


def test_height():
    assert tree_height(parse_tree("()")) == 0
    assert tree_height(parse_tree("(((())))")) == 3
    assert tree_height(parse_tree("(()(()))")) == 2
