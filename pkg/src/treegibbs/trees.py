"""Plane (ordered rooted) trees with bounded out-degree.

A tree is a nested tuple of its child subtrees; the leaf is the empty
tuple.  This keeps trees hashable and cheap to enumerate, with derived
quantities (order, height, per-degree counts, energy) as functions.

Serialization uses balanced parentheses: "(" <children...> ")", so a leaf
is "()" and "(()())" is a root with two leaf children.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import DomainError, ResourceLimitError
from .model import EnergyModel

__all__ = [
    "LEAF",
    "ENUMERATION_LIMIT",
    "enumerate_trees",
    "count_trees",
    "tree_order",
    "tree_height",
    "degree_counts",
    "tree_energy",
    "serialize_tree",
    "parse_tree",
]

LEAF = ()

# Full enumeration is Catalan-explosive; anything past this order must go
# through the weighted-count DP instead.
ENUMERATION_LIMIT = 16


def tree_order(tree) -> int:
    """Number of vertices."""
    return 1 + sum(tree_order(c) for c in tree)


def tree_height(tree) -> int:
    """Maximum distance from the root to a vertex."""
    return 1 + max((tree_height(c) for c in tree), default=-1)


def degree_counts(tree, D: int) -> np.ndarray:
    """Vector chi with chi[i] = number of vertices of out-degree i <= D."""
    chi = np.zeros(D + 1, dtype=np.int64)
    stack = [tree]
    while stack:
        node = stack.pop()
        d = len(node)
        if d > D:
            raise DomainError(f"vertex of out-degree {d} exceeds bound D={D}")
        chi[d] += 1
        stack.extend(node)
    return chi


def tree_energy(tree, model: EnergyModel) -> float:
    """Total energy sum_v E_{deg(v)} of a tree under the model."""
    chi = degree_counts(tree, model.D)
    return float(np.dot(chi, model.E))


def _compositions(total: int, parts: int):
    """Ordered positive integer compositions of `total` into `parts`,
    in lexicographically ascending order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _trees_cached(N: int, D: int) -> tuple:
    if N == 1:
        return (LEAF,)
    out = []
    for d in range(1, min(D, N - 1) + 1):
        for sizes in _compositions(N - 1, d):
            pools = [_trees_cached(s, D) for s in sizes]
            out.extend(itertools.product(*pools))
    return tuple(out)


def enumerate_trees(N: int, D: int, limit: int = ENUMERATION_LIMIT):
    """Yield every plane tree on N vertices with out-degrees <= D, once each.

    Canonical order, frozen for golden tests: root degree d ascending;
    for each d, child-subtree size compositions in lexicographic order;
    child combinations in row-major order (rightmost child cycles fastest),
    each child recursively in this same order.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    if D < 1:
        raise DomainError("D must be >= 1")
    if N > limit:
        raise ResourceLimitError(
            f"full enumeration capped at N={limit} (requested N={N}); "
            "use the weighted-count DP for larger orders"
        )
    yield from _trees_cached(N, D)


def count_trees(N: int, D: int, limit: int = ENUMERATION_LIMIT) -> int:
    """|T_N(D)| by enumeration (subject to the same limit)."""
    return sum(1 for _ in enumerate_trees(N, D, limit=limit))


def serialize_tree(tree) -> str:
    """Balanced-parentheses encoding; the whole tree includes its own parens."""
    return "(" + "".join(serialize_tree(c) for c in tree) + ")"


def parse_tree(text: str):
    """Inverse of serialize_tree.  Raises DomainError on malformed input."""
    pos = 0

    def parse_node():
        nonlocal pos
        if pos >= len(text) or text[pos] != "(":
            raise DomainError(f"expected '(' at position {pos} in {text!r}")
        pos += 1
        children = []
        while pos < len(text) and text[pos] == "(":
            children.append(parse_node())
        if pos >= len(text) or text[pos] != ")":
            raise DomainError(f"expected ')' at position {pos} in {text!r}")
        pos += 1
        return tuple(children)

    tree = parse_node()
    if pos != len(text):
        raise DomainError(f"trailing characters after position {pos} in {text!r}")
    return tree
