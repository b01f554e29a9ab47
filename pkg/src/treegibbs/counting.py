"""Exact finite-size machinery: weighted tree/forest counts and projections.

The central object is the table F[m] = sum over plane trees on m vertices
of exp(-beta * E(T)), built by the root-degree recursion

    F[m] = sum_d w_d * (F convolved d times)[m - 1],      w_d = e^{-beta E_d},

entirely in log space so large |beta| and m up to a couple thousand are
safe.  Forest tables G_k (k-fold convolutions of F) give partition
functions of the forests hanging below a root neighborhood, which is all
that is needed for the exact projected distribution at finite N.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, EmptySupportError, ResourceLimitError
from .model import EnergyModel
from .neighborhoods import enumerate_neighborhoods

__all__ = [
    "WeightedCountTable",
    "partition_function",
    "forest_count",
    "pushforward_finite",
    "DP_LIMIT",
]

DP_LIMIT = 2000


def _logsumexp_pair(a: np.ndarray, b: np.ndarray) -> float:
    """log(sum exp(a + b)) for aligned 1-D slices; -inf on empty input."""
    if len(a) == 0:
        return -math.inf
    s = a + b
    m = s.max()
    if m == -math.inf:
        return -math.inf
    return float(m + np.log(np.exp(s - m).sum()))


class WeightedCountTable:
    """Log-space tables of Gibbs-weighted tree and forest counts.

    log_F[m] = log sum_{T on m vertices} e^{-beta E(T)}; forest tables
    log_G(k)[j] = log of the same sum over ordered forests of k trees on j
    vertices.  Tables are immutable after construction except for lazily
    extending the forest order k.
    """

    def __init__(self, model: EnergyModel, n_max: int):
        if n_max < 1:
            raise DomainError("n_max must be >= 1")
        if n_max > DP_LIMIT:
            raise ResourceLimitError(f"DP table capped at {DP_LIMIT} vertices")
        self.model = model
        self.n_max = n_max
        log_w = model.log_weights
        D = model.D
        neg = -math.inf
        F = np.full(n_max + 1, neg)
        F[1] = log_w[0]
        # G[d][j]: ordered forests of d trees on j vertices, filled for j < m
        # as m advances (each component has at least one vertex).
        G = [None, F] + [np.full(n_max + 1, neg) for _ in range(2, D + 1)]
        for m in range(2, n_max + 1):
            j = m - 1
            for d in range(2, D + 1):
                if j < d:
                    continue
                # split forest = (d-1 trees on a vertices, tree on j - a)
                a_lo, a_hi = d - 1, j - 1
                G[d][j] = _logsumexp_pair(
                    G[d - 1][a_lo : a_hi + 1], F[j - a_lo : j - a_hi - 1 : -1]
                )
            parts = np.array([log_w[d] + G[d][j] for d in range(1, min(D, j) + 1)])
            F[m] = _logsumexp_pair(parts, np.zeros(len(parts)))
        self._F = F
        self._G = {d: G[d] for d in range(2, D + 1)}
        self._G[1] = F

    def log_tree_count(self, m: int) -> float:
        if not 1 <= m <= self.n_max:
            raise DomainError(f"m={m} outside table range 1..{self.n_max}")
        return float(self._F[m])

    def log_Z(self, N: int) -> float:
        return self.log_tree_count(N)

    def log_forest_count(self, j: int, k: int) -> float:
        """log-weighted count of ordered k-tree forests on j vertices."""
        if k < 1:
            raise DomainError("forest order k must be >= 1")
        if not 0 <= j <= self.n_max:
            raise DomainError(f"j={j} outside table range 0..{self.n_max}")
        kmax = max(self._G)
        while k > kmax:
            prev = self._G[kmax]
            kmax += 1
            nxt = np.full(self.n_max + 1, -math.inf)
            for jj in range(kmax, self.n_max + 1):
                nxt[jj] = _logsumexp_pair(
                    prev[kmax - 1 : jj], self._F[jj - kmax + 1 : 0 : -1]
                )
            self._G[kmax] = nxt
        return float(self._G[k][j]) if j >= 1 else -math.inf


def partition_function(N: int, model: EnergyModel, table: WeightedCountTable = None) -> float:
    """log Z_N, the log of the Gibbs normalizer over trees on N vertices."""
    if N < 1:
        raise DomainError("N must be >= 1")
    if table is None:
        table = WeightedCountTable(model, N)
    return table.log_Z(N)


def forest_count(N: int, k: int, r) -> int:
    """Exact number of plane forests on N vertices with k components and
    degree profile r (r[i] vertices of out-degree i).

    Equals (k/N) * multinomial(N; r) when sum r = N and sum i*r_i = N - k,
    and 0 otherwise.  Exact integer arithmetic throughout.
    """
    if N < 1 or k < 1:
        raise DomainError("need N >= 1 and k >= 1")
    r = [int(x) for x in r]
    if any(x < 0 for x in r):
        raise DomainError("degree profile entries must be nonnegative")
    if sum(r) != N or sum(i * x for i, x in enumerate(r)) != N - k:
        return 0
    num = k * math.factorial(N - 1)
    den = math.prod(math.factorial(x) for x in r)
    count, rem = divmod(num, den)
    if rem:  # cycle lemma guarantees integrality
        raise AssertionError("forest count formula produced a non-integer")
    return count


def pushforward_finite(
    N: int,
    n: int,
    model: EnergyModel,
    table: WeightedCountTable = None,
    atoms=None,
) -> dict:
    """Exact law of the height-n root neighborhood of a Gibbs tree on N vertices.

    Atom probability: e^{-beta Ebar(tau)} * G_k[N - m] / Z_N, where the
    k-tree forest on the remaining N - m vertices hangs from the height-n
    vertices.  Requires N > (D^n - 1)/(D - 1), i.e. N large enough that no
    tree on N vertices has height < n, so the projection lands entirely on
    height-n atoms and the returned probabilities sum to 1.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    D = model.D
    min_N = (D**n - 1) // (D - 1)
    if N <= min_N:
        raise EmptySupportError(
            f"projection to height {n} needs N > {min_N} for D={D} "
            f"(got N={N}): shorter trees would carry positive mass"
        )
    if table is None:
        table = WeightedCountTable(model, N)
    if atoms is None:
        atoms = enumerate_neighborhoods(n, D)
    log_Z = table.log_Z(N)
    out = {}
    for atom in atoms:
        rest = N - atom.m
        if rest < atom.k:
            continue  # atom needs more vertices than N provides
        log_p = (
            -model.beta * atom.ebar(model)
            + table.log_forest_count(rest, atom.k)
            - log_Z
        )
        out[atom] = math.exp(log_p)
    return out
