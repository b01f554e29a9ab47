"""Closed-form limiting neighborhood measures and convergence diagnostics.

The limiting law of the height-n root neighborhood assigns an atom with
statistics (k, m, Ebar) the probability

    C * k * e^{-beta Ebar} * rho^k * sigma^{m-1},

one fixed normalizer C for every n.  This module evaluates that law,
verifies its tower consistency across heights, and measures total-variation
distance to the exact finite-size projections of the counting module.
"""

from __future__ import annotations

import math

import numpy as np

from .counting import WeightedCountTable, pushforward_finite
from .errors import DomainError
from .model import CriticalParams, critical_params
from .neighborhoods import NeighborhoodTree, enumerate_neighborhoods

__all__ = [
    "limit_log_prob",
    "limit_prob",
    "check_consistency",
    "tv_distance",
    "ratio_check",
]


def limit_log_prob(atom: NeighborhoodTree, params: CriticalParams) -> float:
    """log of the limiting probability of a height-n atom."""
    ebar = atom.ebar(params.model)
    return (
        params.log_C
        + math.log(atom.k)
        - params.model.beta * ebar
        + atom.k * params.log_rho
        + (atom.m - 1) * params.log_sigma
    )


def limit_prob(atom: NeighborhoodTree, params: CriticalParams) -> float:
    """Limiting probability of a height-n atom (computed in log space)."""
    return math.exp(limit_log_prob(atom, params))


def _log_offspring_total_sum(k: int, params: CriticalParams) -> float:
    """log sum over offspring vectors (i_1..i_k) in {0..D}^k of
    (i_1+...+i_k) * rho^(sum i) * prod e^{-beta E_{i_j}}.

    Computed by k-fold polynomial convolution grouped by the total, i.e. a
    direct summation of all extension weights without invoking the simplex
    identities of the critical point.
    """
    log_x = params.model.log_weights + np.arange(params.D + 1) * params.log_rho
    shift = log_x.max()
    x = np.exp(log_x - shift)
    poly = np.ones(1)
    for _ in range(k):
        poly = np.convolve(poly, x)
    s = np.arange(len(poly), dtype=np.float64)
    total = float(np.dot(s, poly))
    return math.log(total) + k * shift


def check_consistency(n: int, params: CriticalParams, atoms=None) -> float:
    """Max over height-n atoms of |P_n(atom) - sum of its height-(n+1)
    extension probabilities|.

    The extension sum groups the (D+1)^k offspring vectors of the k
    height-n vertices by their total, which enumerates every extension's
    weight exactly (vectors with total 0 leave the height unchanged and
    carry zero weight anyway).
    """
    if atoms is None:
        atoms = enumerate_neighborhoods(n, params.D)
    beta = params.model.beta
    worst = 0.0
    for atom in atoms:
        p_n = limit_prob(atom, params)
        log_ext = (
            params.log_C
            + (atom.m + atom.k - 1) * params.log_sigma
            - beta * atom.ebar(params.model)
            + _log_offspring_total_sum(atom.k, params)
        )
        worst = max(worst, abs(p_n - math.exp(log_ext)))
    return worst


def tv_distance(
    N: int,
    n: int,
    model,
    params: CriticalParams = None,
    table: WeightedCountTable = None,
    atoms=None,
) -> float:
    """Total variation between the exact size-N projection and the limit law.

    Both measures live on the (finite) set of height-n atoms; atoms too
    large to fit in N vertices contribute their full limiting mass.
    """
    if params is None:
        params = critical_params(model)
    if atoms is None:
        atoms = enumerate_neighborhoods(n, model.D)
    finite = pushforward_finite(N, n, model, table=table, atoms=atoms)
    diffs = [abs(finite.get(atom, 0.0) - limit_prob(atom, params)) for atom in atoms]
    return 0.5 * math.fsum(diffs)


def ratio_check(
    tau1: NeighborhoodTree,
    tau2: NeighborhoodTree,
    N: int,
    model,
    params: CriticalParams = None,
    table: WeightedCountTable = None,
) -> tuple:
    """(finite-N probability ratio, limiting ratio) for two atoms of equal height.

    The limiting ratio is k1 e^{-b Ebar1} rho^{k1} sigma^{m1} over the same
    expression for the second atom; the finite ratio comes from the exact
    projection.  Raises DomainError if either atom has zero finite-N mass.
    """
    if tau1.n != tau2.n:
        raise DomainError("atoms must have the same height")
    if params is None:
        params = critical_params(model)
    finite = pushforward_finite(N, tau1.n, model, table=table, atoms=[tau1, tau2])
    p1, p2 = finite.get(tau1, 0.0), finite.get(tau2, 0.0)
    if p1 <= 0.0 or p2 <= 0.0:
        raise DomainError("both atoms need positive finite-N probability")
    limit = math.exp(limit_log_prob(tau1, params) - limit_log_prob(tau2, params))
    return p1 / p2, limit
