"""Goodness-of-fit statistics: Kolmogorov-Smirnov and chi-square.

The KS p-values use the asymptotic Kolmogorov distribution (the scaled
statistic sqrt(n) * D_n); exact small-sample p-values are out of scope.
scipy serves as the independent oracle for these in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2 as _chi2

from .errors import DomainError

__all__ = [
    "KsResult",
    "Chi2Result",
    "kolmogorov_sf",
    "ks_statistic",
    "ks_test",
    "ks_two_sample",
    "chi2_gof",
]


@dataclass(frozen=True)
class KsResult:
    statistic: float
    pvalue: float
    n: int


@dataclass(frozen=True)
class Chi2Result:
    statistic: float
    dof: int
    pvalue: float
    n_cells: int  # after pooling


def kolmogorov_sf(lam: float) -> float:
    """Survival function of the Kolmogorov distribution,
    2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lam^2)."""
    if lam <= 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    for j in range(1, 1001):
        term = math.exp(-2.0 * (j * lam) ** 2)
        total += sign * term
        if term < 1e-18:
            break
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_statistic(sample, cdf) -> float:
    """One-sample KS statistic sup_x |F_n(x) - F(x)| against a callable CDF."""
    x = np.sort(np.asarray(sample, dtype=np.float64))
    n = len(x)
    if n == 0:
        raise DomainError("sample must be nonempty")
    f = np.asarray(cdf(x), dtype=np.float64)
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - f), np.max(f - (grid - 1.0 / n))))


def ks_test(sample, cdf) -> KsResult:
    """One-sample KS test with the asymptotic p-value."""
    d = ks_statistic(sample, cdf)
    n = len(sample)
    return KsResult(statistic=d, pvalue=kolmogorov_sf(math.sqrt(n) * d), n=n)


def ks_two_sample(x, y) -> KsResult:
    """Two-sample KS test with the asymptotic p-value."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    n1, n2 = len(x), len(y)
    if n1 == 0 or n2 == 0:
        raise DomainError("both samples must be nonempty")
    both = np.concatenate([x, y])
    cdf1 = np.searchsorted(x, both, side="right") / n1
    cdf2 = np.searchsorted(y, both, side="right") / n2
    d = float(np.max(np.abs(cdf1 - cdf2)))
    en = math.sqrt(n1 * n2 / (n1 + n2))
    return KsResult(statistic=d, pvalue=kolmogorov_sf(en * d), n=min(n1, n2))


def chi2_gof(observed, expected_probs, min_expected: float = 5.0) -> Chi2Result:
    """Chi-square goodness of fit with tail pooling.

    Cells whose expected count falls below min_expected are pooled into a
    single bucket (merged into the smallest regular cell if the pool is
    still too thin).  dof = cells - 1.
    """
    obs = np.asarray(observed, dtype=np.float64)
    probs = np.asarray(expected_probs, dtype=np.float64)
    if obs.shape != probs.shape:
        raise DomainError("observed and expected shapes differ")
    total = obs.sum()
    exp = probs / probs.sum() * total
    big = exp >= min_expected
    obs_cells = list(obs[big])
    exp_cells = list(exp[big])
    pooled_obs, pooled_exp = obs[~big].sum(), exp[~big].sum()
    if pooled_exp > 0.0:
        if pooled_exp < min_expected and exp_cells:
            j = int(np.argmin(exp_cells))
            obs_cells[j] += pooled_obs
            exp_cells[j] += pooled_exp
        else:
            obs_cells.append(pooled_obs)
            exp_cells.append(pooled_exp)
    if len(exp_cells) < 2:
        raise DomainError("fewer than two cells left after pooling")
    o = np.array(obs_cells)
    e = np.array(exp_cells)
    stat = float(np.sum((o - e) ** 2 / e))
    dof = len(e) - 1
    return Chi2Result(
        statistic=stat,
        dof=dof,
        pvalue=float(_chi2.sf(stat, dof)),
        n_cells=len(e),
    )
