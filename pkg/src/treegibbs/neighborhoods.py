"""Height-n root neighborhoods: the atoms of the projected distributions.

An atom is a plane tree of height exactly n.  Its probability under both
the finite-size projection and the limiting measure depends only on

    k  = number of vertices at height n,
    m  = number of vertices at height < n,
    inner degree profile = multiset of out-degrees over the m inner
    vertices (the height-n vertices' degrees are *not* part of the atom's
    own energy; whatever hangs below them belongs to the attached forest).

Enumeration proceeds level by level through offspring-count vectors, never
by filtering all trees of a given order by height.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceLimitError
from .model import EnergyModel
from .trees import serialize_tree, tree_height

__all__ = [
    "NeighborhoodTree",
    "enumerate_neighborhoods",
    "neighborhood_from_tree",
    "levels_to_tree",
    "tree_to_levels",
    "counts_to_level",
]


def counts_to_level(counts) -> tuple:
    """Parent-index encoding of a level from per-parent offspring counts.

    Children of parent j (1-based) form a contiguous block, so the encoding
    is the canonical nondecreasing one.
    """
    out = []
    for j, c in enumerate(counts, start=1):
        out.extend([j] * int(c))
    return tuple(out)


def levels_to_tree(levels):
    """Assemble a plane tree from parent-index levels (g_1, ..., g_n).

    Level entries are 1-based indices into the previous level; the root
    level is implicit.  Vertices with no children in the next level (or in
    the last level) become leaves.
    """
    sizes = [1] + [len(g) for g in levels]
    for depth, g in enumerate(levels):
        if len(g) == 0:
            raise DomainError("levels must be nonempty")
        prev = sizes[depth]
        if any(not 1 <= int(j) <= prev for j in g):
            raise DomainError(f"level {depth + 1} references a missing parent")
        if any(int(a) > int(b) for a, b in zip(g, list(g)[1:])):
            raise DomainError(f"level {depth + 1} is not in canonical nondecreasing order")
    # Build bottom-up: subtrees of the deepest level are leaves.
    below = [()] * sizes[-1]
    for depth in range(len(levels), 0, -1):
        g = levels[depth - 1]
        groups = [[] for _ in range(sizes[depth - 1])]
        for child_idx, parent in enumerate(g):
            groups[int(parent) - 1].append(below[child_idx])
        below = [tuple(g_) for g_ in groups]
    return below[0]


def tree_to_levels(tree):
    """Inverse of levels_to_tree: breadth-first parent-index encoding."""
    levels = []
    current = [tree]  # vertices at the current height, in plane order
    while True:
        g = []
        nxt = []
        for parent_idx, node in enumerate(current, start=1):
            for child in node:
                g.append(parent_idx)
                nxt.append(child)
        if not g:
            return levels
        levels.append(tuple(g))
        current = nxt


@dataclass(frozen=True)
class NeighborhoodTree:
    """A height-n atom with its (k, m, inner degree profile) statistics."""

    tree: tuple
    n: int
    k: int
    m: int
    inner_degrees: tuple  # inner_degrees[i] = inner vertices of out-degree i

    def ebar(self, model: EnergyModel) -> float:
        """Energy of the inner vertices only (heights 0..n-1)."""
        if len(self.inner_degrees) > model.D + 1:
            raise DomainError(
                f"atom has inner degree {len(self.inner_degrees) - 1} > D={model.D}"
            )
        return float(
            sum(c * model.E[i] for i, c in enumerate(self.inner_degrees) if c)
        )

    def serialize(self) -> str:
        return serialize_tree(self.tree)


def _stats_from_counts(count_levels) -> tuple:
    """(k, m, inner degree profile) from per-level offspring count vectors."""
    m = 1 + sum(len(c) for c in count_levels[1:])
    k = sum(count_levels[-1])
    max_deg = max(max(c) for c in count_levels)
    profile = [0] * (max_deg + 1)
    for c in count_levels:
        for d in c:
            profile[d] += 1
    return k, m, tuple(profile)


def _atom_from_counts(count_levels, n: int) -> NeighborhoodTree:
    levels = [counts_to_level(c) for c in count_levels]
    k, m, profile = _stats_from_counts(count_levels)
    return NeighborhoodTree(
        tree=levels_to_tree(levels), n=n, k=k, m=m, inner_degrees=profile
    )


def enumerate_neighborhoods(n: int, D: int, max_atoms: int = 1_000_000):
    """All atoms of height exactly n with out-degrees <= D.

    Grows count-vector sequences one level at a time; every level must
    produce at least one child so the height is exactly n.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if D < 1:
        raise DomainError("D must be >= 1")
    partial = [((d,),) for d in range(1, D + 1)]
    for _ in range(n - 1):
        extended = []
        for counts in partial:
            width = sum(counts[-1])
            for ext in itertools.product(range(D + 1), repeat=width):
                if sum(ext) == 0:
                    continue
                extended.append(counts + (ext,))
                if len(extended) > max_atoms:
                    raise ResourceLimitError(
                        f"neighborhood enumeration exceeded {max_atoms} atoms"
                    )
        partial = extended
    return [_atom_from_counts(c, n) for c in partial]


def neighborhood_from_tree(tree, n: int) -> NeighborhoodTree:
    """Wrap a concrete tree of height exactly n as an atom."""
    if tree_height(tree) != n:
        raise DomainError(f"tree has height {tree_height(tree)}, expected {n}")
    k = 0
    m = 0
    max_deg = 0
    counts = {}
    stack = [(tree, 0)]
    while stack:
        node, h = stack.pop()
        if h == n:
            k += 1
            continue
        m += 1
        d = len(node)
        counts[d] = counts.get(d, 0) + 1
        max_deg = max(max_deg, d)
        stack.extend((c, h + 1) for c in node)
    profile = tuple(counts.get(d, 0) for d in range(max_deg + 1))
    return NeighborhoodTree(tree=tree, n=n, k=k, m=m, inner_degrees=profile)
