"""The limiting infinite random tree: level encodings, Markov kernel, sampler.

A level is a nondecreasing vector of 1-based parent indices into the
previous level (children of one parent form a contiguous block).  The tree
grows level by level under the kernel

    P(g -> g') = (|g'|/|g|) e^{-beta E(g, g')} rho^{|g'|-|g|} sigma^{|g|},

realized exactly by a size-biased construction: one uniformly chosen
special vertex draws its offspring count from i*p*_i, every other vertex
draws from p* independently.  The level-size process and the per-group
progeny process are marginals of the same construction; their batched
steps are delegated to the compiled/NumPy kernels.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, ResourceLimitError
from .model import CriticalParams

__all__ = [
    "TreeTrajectory",
    "GroupLabeling",
    "is_extension",
    "offspring_histogram",
    "level_energy",
    "transition_prob",
    "log_transition_prob",
    "size_biased_law",
    "sample_offspring_counts",
    "sample_next_level",
    "sample_trajectory",
    "size_transition_prob",
    "size_transition_row",
    "YDistribution",
    "exact_Y_distribution",
    "step_level_sizes",
    "sample_level_sizes",
    "step_group_sizes",
    "track_progeny",
    "contiguous_labeling",
    "conditional_moment_formula",
    "conditional_moment_exhaustive",
]


def _as_level(g) -> np.ndarray:
    g = np.asarray(g, dtype=np.int64)
    if g.ndim != 1:
        raise DomainError("a level must be a 1-D vector of parent indices")
    return g


def is_extension(g, g_next) -> bool:
    """True when g_next is a canonical child level of g."""
    g = _as_level(g)
    g_next = _as_level(g_next)
    if len(g) == 0:
        return False
    if len(g_next) == 0:
        return True  # all vertices of g are leaves
    if g_next.min() < 1 or g_next.max() > len(g):
        return False
    return bool(np.all(np.diff(g_next) >= 0))


def offspring_histogram(g, g_next) -> np.ndarray:
    """Children counts per parent: entry i-1 is #{j : g_next[j] = i}."""
    g = _as_level(g)
    g_next = _as_level(g_next)
    if not is_extension(g, g_next):
        raise DomainError("g_next is not a canonical extension of g")
    return np.bincount(g_next - 1, minlength=len(g))


def level_energy(g, g_next, model) -> float:
    """Energy induced at level g by its child level: sum_i E_{#children(i)}.

    Parents with no children contribute E_0.
    """
    counts = offspring_histogram(g, g_next)
    if counts.max(initial=0) > model.D:
        raise DomainError(f"a parent has {counts.max()} > D children")
    return float(np.take(model.E, counts).sum())


def log_transition_prob(g, g_next, params: CriticalParams) -> float:
    """log kernel probability; -inf off support."""
    g = _as_level(g)
    g_next = _as_level(g_next)
    if len(g_next) == 0 or not is_extension(g, g_next):
        return -math.inf
    counts = np.bincount(g_next - 1, minlength=len(g))
    if counts.max() > params.D:
        return -math.inf
    k, k2 = len(g), len(g_next)
    energy = float(np.take(params.model.E, counts).sum())
    return (
        math.log(k2)
        - math.log(k)
        - params.model.beta * energy
        + (k2 - k) * params.log_rho
        + k * params.log_sigma
    )


def transition_prob(g, g_next, params: CriticalParams) -> float:
    """Kernel probability of moving from level g to level g_next."""
    lp = log_transition_prob(g, g_next, params)
    return 0.0 if lp == -math.inf else math.exp(lp)


def size_biased_law(params: CriticalParams) -> np.ndarray:
    """The special vertex's offspring law i * p*_i (a probability vector
    because the critical point has mean 1)."""
    h = np.arange(params.D + 1) * params.p_star
    return h / h.sum()


def sample_offspring_counts(k: int, params: CriticalParams, rng, size: int = None):
    """Offspring counts (c_1..c_k): one uniformly placed special vertex from
    the size-biased law, the rest iid p*.

    The induced joint law is (sum c / k) * prod p*_{c_j}, which is exactly
    the level kernel after the weight identity 1/C = rho/sigma.  With
    `size` given, returns a (size, k) batch.
    """
    if k < 1:
        raise DomainError("level size k must be >= 1")
    squeeze = size is None
    batch = 1 if squeeze else int(size)
    counts = rng.choice(params.D + 1, size=(batch, k), p=params.p_star)
    special = rng.integers(0, k, size=batch)
    counts[np.arange(batch), special] = rng.choice(
        params.D + 1, size=batch, p=size_biased_law(params)
    )
    return counts[0] if squeeze else counts


def sample_next_level(g, params: CriticalParams, rng) -> np.ndarray:
    """One kernel step: sample the canonical child level of g."""
    g = _as_level(g)
    counts = sample_offspring_counts(len(g), params, rng)
    return np.repeat(np.arange(1, len(g) + 1, dtype=np.int64), counts)


@dataclass
class TreeTrajectory:
    """Levels g_1..g_n of one sampled tree (the root level is implicit),
    plus provenance of the random stream that generated it."""

    levels: list
    seed_info: str = ""

    @property
    def sizes(self) -> np.ndarray:
        return np.array([1] + [len(g) for g in self.levels], dtype=np.int64)

    def to_text(self) -> str:
        return "\n".join(" ".join(str(int(v)) for v in g) for g in self.levels) + "\n"


def sample_trajectory(
    n_levels: int, params: CriticalParams, rng, seed_info: str = ""
) -> TreeTrajectory:
    """Sample the first n_levels levels of the infinite tree."""
    if n_levels < 1:
        raise DomainError("n_levels must be >= 1")
    levels = []
    g = np.array([1], dtype=np.int64)  # the root level
    for _ in range(n_levels):
        g = sample_next_level(g, params, rng)
        levels.append(g)
    return TreeTrajectory(levels=levels, seed_info=seed_info)


def size_transition_row(k: int, params: CriticalParams) -> np.ndarray:
    """Distribution of the next level size from size k: entry k' is
    (k'/k) * P(sum of k iid p* draws = k'), for k' = 0..k*D."""
    if k < 1:
        raise DomainError("level size k must be >= 1")
    conv = np.ones(1)
    for _ in range(k):
        conv = np.convolve(conv, params.p_star)
    return conv * np.arange(len(conv)) / k


def size_transition_prob(k: int, k_next: int, params: CriticalParams) -> float:
    """Kernel of the level-size Markov chain."""
    row = size_transition_row(k, params)
    if not 0 <= k_next < len(row):
        return 0.0
    return float(row[k_next])


@dataclass
class YDistribution:
    """Exact level-size distribution with truncation bookkeeping."""

    n: int
    probs: np.ndarray  # probs[k] = P(Y_n = k); mass 1 - dropped_mass
    dropped_mass: float

    @property
    def mean(self) -> float:
        return float(np.dot(np.arange(len(self.probs)), self.probs))


def exact_Y_distribution(
    n: int,
    params: CriticalParams,
    tail_tol: float = 1e-16,
    budget: float = 1e-12,
    n_max: int = 200,
) -> YDistribution:
    """Distribution of the level size after n steps from Y_0 = 1.

    Each step applies the size kernel to the whole distribution at once via
    a Horner-style convolution ladder; trailing states with cumulative mass
    below tail_tol are dropped and tracked, erroring out if the total
    dropped mass would exceed the budget.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    if n > n_max:
        raise ResourceLimitError(f"exact distribution capped at n_max={n_max}")
    p = params.p_star
    q = np.array([0.0, 1.0])
    dropped = 0.0
    for _ in range(n):
        K = len(q) - 1
        amp = np.zeros_like(q)
        amp[1:] = q[1:] / np.arange(1, K + 1)
        # Horner over the offspring polynomial: sum_k amp[k] * p^(*k)
        acc = np.array([amp[K]])
        for k in range(K - 1, 0, -1):
            acc = np.convolve(acc, p)
            acc[0] += amp[k]
        acc = np.convolve(acc, p)
        q = acc * np.arange(len(acc))
        rev_cum = np.cumsum(q[::-1])
        n_drop = int(np.searchsorted(rev_cum, tail_tol, side="right"))
        n_drop = min(n_drop, len(q) - 2)  # always keep states 0..1
        if n_drop > 0:
            dropped += float(rev_cum[n_drop - 1])
            q = q[:-n_drop]
        if dropped > budget:
            raise ResourceLimitError(
                f"truncated mass {dropped:.3e} exceeds budget {budget:.1e}"
            )
    return YDistribution(n=n, probs=q, dropped_mass=dropped)


def step_level_sizes(sizes: np.ndarray, params: CriticalParams, rng) -> np.ndarray:
    """One kernel step for a batch of level sizes (delegates to the kernels)."""
    return _kernels.step_sizes(sizes, params.p_star, rng)


def sample_level_sizes(
    n: int, params: CriticalParams, rng, paths: int
) -> np.ndarray:
    """Monte Carlo batch of Y_n: `paths` independent size chains run n steps."""
    sizes = np.ones(paths, dtype=np.int64)
    for _ in range(n):
        sizes = _kernels.step_sizes(sizes, params.p_star, rng)
    return sizes


def step_group_sizes(V: np.ndarray, params: CriticalParams, rng) -> np.ndarray:
    """One kernel step for batched per-group progeny counts (paths, r)."""
    return _kernels.step_groups(V, params.p_star, rng)


@dataclass
class GroupLabeling:
    """Assignment of each vertex of level `level_index` to one of r groups."""

    level_index: int
    groups: np.ndarray  # group id per vertex, values 0..r-1

    def __post_init__(self):
        self.groups = np.asarray(self.groups, dtype=np.int64)
        if self.groups.ndim != 1 or len(self.groups) == 0:
            raise DomainError("labeling must be a nonempty 1-D vector")
        self.r = int(self.groups.max()) + 1
        if self.groups.min() < 0:
            raise DomainError("group ids must be nonnegative")
        present = np.bincount(self.groups, minlength=self.r)
        if np.any(present == 0):
            raise DomainError("every group must be nonempty")


def contiguous_labeling(size: int, r: int, level_index: int = 0) -> GroupLabeling:
    """Split a level of `size` vertices into r near-equal contiguous groups."""
    if not 1 <= r <= size:
        raise DomainError("need 1 <= r <= level size")
    return GroupLabeling(
        level_index=level_index,
        groups=(np.arange(size) * r) // size,
    )


def track_progeny(trajectory: TreeTrajectory, labeling: GroupLabeling) -> np.ndarray:
    """Per-level progeny counts V_1..V_r of the labeled groups.

    Row j holds the counts at level labeling.level_index + j; children
    inherit their parent's group, so each row sums to that level's size.
    """
    n0 = labeling.level_index
    sizes = trajectory.sizes
    if n0 < 0 or n0 >= len(sizes):
        raise DomainError(f"level_index {n0} outside trajectory")
    if len(labeling.groups) != sizes[n0]:
        raise DomainError(
            f"labeling covers {len(labeling.groups)} vertices, level has {sizes[n0]}"
        )
    rows = [np.bincount(labeling.groups, minlength=labeling.r)]
    labels = labeling.groups
    for g in trajectory.levels[n0:]:
        labels = labels[np.asarray(g) - 1]
        rows.append(np.bincount(labels, minlength=labeling.r))
    return np.vstack(rows)


def conditional_moment_formula(k: int, order: int, params: CriticalParams) -> float:
    """Closed-form conditional moments E[Y_{next}^order | Y = k] of the size
    chain, expressed through the offspring moments B_n."""
    B2, B3, B4, B5 = (float(params.B[i]) for i in range(1, 5))
    k = float(k)
    if order == 1:
        return params.mu + k
    if order == 2:
        return B3 + 3 * (k - 1) * B2 + (k - 1) * (k - 2)
    if order == 3:
        return (
            B4
            + 4 * (k - 1) * B3
            + 6 * (k - 1) * (k - 2) * B2
            + 3 * (k - 1) * B2**2
            + (k - 1) * (k - 2) * (k - 3)
        )
    if order == 4:
        return (
            B5
            + 5 * (k - 1) * B4
            + 10 * (k - 1) * (k - 2) * B3
            + 10 * (k - 1) * B3 * B2
            + 15 * (k - 1) * (k - 2) * B2**2
            + 10 * (k - 1) * (k - 2) * (k - 3) * B2
            + (k - 1) * (k - 2) * (k - 3) * (k - 4)
        )
    raise DomainError("moment order must be 1..4")


def conditional_moment_exhaustive(k: int, order: int, params: CriticalParams) -> float:
    """E[Y_{next}^order | Y = k] by exhaustive summation over all (D+1)^k
    offspring vectors, weighting each by (sum/k) * prod p*."""
    if k < 1:
        raise DomainError("k must be >= 1")
    D = params.D
    p = params.p_star
    total = 0.0
    for vec in itertools.product(range(D + 1), repeat=k):
        s = sum(vec)
        prob = s / k * math.prod(p[i] for i in vec)
        total += prob * s**order
    return total
