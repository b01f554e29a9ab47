"""Height-n atoms: enumeration by level extension and tree conversion."""

import pytest

from treegibbs.errors import DomainError
from treegibbs.model import EnergyModel
from treegibbs.neighborhoods import (
    counts_to_level,
    enumerate_neighborhoods,
    levels_to_tree,
    neighborhood_from_tree,
    tree_to_levels,
)
from treegibbs.trees import enumerate_trees, parse_tree, tree_height


def test_counts_to_level():
    assert counts_to_level((2, 0, 1)) == (1, 1, 3)
    assert counts_to_level(()) == ()


def test_levels_roundtrip():
    for tree in enumerate_trees(7, 3):
        if tree == ():
            continue
        assert levels_to_tree(tree_to_levels(tree)) == tree


def test_levels_to_tree_validation():
    with pytest.raises(DomainError):
        levels_to_tree([(1, 3)])  # parent 3 missing at root level
    with pytest.raises(DomainError):
        levels_to_tree([(1, 1), (2, 1)])  # not nondecreasing


def test_atom_counts():
    assert len(enumerate_neighborhoods(1, 2)) == 2
    assert len(enumerate_neighborhoods(1, 3)) == 3
    # one level extension: sum over root degrees k of (D+1)^k - 1
    assert len(enumerate_neighborhoods(2, 2)) == (3**1 - 1) + (3**2 - 1)
    assert len(enumerate_neighborhoods(2, 3)) == (4 - 1) + (16 - 1) + (64 - 1)


def test_atom_statistics():
    model = EnergyModel(D=2, E=(0.5, -1.0, 2.0), beta=1.0)
    for atom in enumerate_neighborhoods(2, 2):
        assert tree_height(atom.tree) == 2
        assert atom.k >= 1
        assert atom.m >= 2  # root plus at least one level-1 vertex
        rebuilt = neighborhood_from_tree(atom.tree, 2)
        assert rebuilt.k == atom.k
        assert rebuilt.m == atom.m
        assert rebuilt.ebar(model) == pytest.approx(atom.ebar(model), abs=1e-12)


def test_ebar_excludes_top_level():
    # path of height 2: inner vertices are the root and the middle vertex,
    # both of out-degree 1; the top vertex's degree is not counted
    atom = neighborhood_from_tree(parse_tree("((()))"), 2)
    model = EnergyModel(D=2, E=(10.0, 1.0, 100.0), beta=1.0)
    assert atom.ebar(model) == 2.0


def test_from_tree_height_mismatch():
    with pytest.raises(DomainError):
        neighborhood_from_tree(parse_tree("(())"), 2)
