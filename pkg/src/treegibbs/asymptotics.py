"""Long-time behavior of the level-size chain and its diffusion approximation.

Three routes are implemented and cross-checked:

* deterministic Laplace-transform iteration L_{n+1}(s) = z(s) L_n(f(s))
  with f = log of the offspring generating function, driven to the
  closed-form limit (1 - mu*x/2)^{-2};
* Monte Carlo sampling of the level sizes, rescaled by 2/(mu*n) and tested
  against the shape-2 gamma law with CDF 1 - e^{-t}(1 + t);
* Euler-Maruyama for dZ = mu dt + sqrt(mu max(Z,0)) dW (and its per-group
  vector version with drift mu V_i / sum V and independent noises).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .infinite import sample_level_sizes, step_group_sizes, step_level_sizes
from .model import CriticalParams
from .stats import KsResult, ks_test, ks_two_sample

__all__ = [
    "LaplaceIteration",
    "laplace_exact",
    "laplace_via_distribution",
    "comparison_iterates",
    "gamma2_cdf",
    "gamma_limit_test",
    "SdePath",
    "simulate_besq",
    "simulate_groups",
    "GroupIncrementStats",
    "group_increment_stats",
    "compare_discrete_vs_sde",
]


class LaplaceIteration:
    """The transforms v, w = v', f = ln v, z = f' of the offspring law p*,
    and the iteration computing L_n(x/n) = E exp((x/n) Y_n)."""

    def __init__(self, params: CriticalParams):
        self.params = params
        self._i = np.arange(params.D + 1, dtype=np.float64)
        self._p = params.p_star

    def v(self, s):
        return np.exp(np.multiply.outer(s, self._i)) @ self._p

    def w(self, s):
        return np.exp(np.multiply.outer(s, self._i)) @ (self._i * self._p)

    def f(self, s):
        return np.log(self.v(s))

    def z(self, s):
        return self.w(s) / self.v(s)

    def iterates(self, n: int, x: float) -> np.ndarray:
        """x_k = f applied k times to x/n, for k = 0..n."""
        if x > 0.0:
            raise DomainError("the transform argument must be <= 0")
        out = np.empty(n + 1)
        s = x / n
        for k in range(n + 1):
            out[k] = s
            s = float(self.f(s))
        return out

    def value(self, n: int, x: float) -> float:
        """L_n(x/n) = prod_{k<n} z(x_k) * exp(x_n), compensated accumulation."""
        xs = self.iterates(n, x)
        log_terms = [math.log(float(self.z(s))) for s in xs[:-1]]
        log_terms.append(float(xs[-1]))
        return math.exp(math.fsum(log_terms))


def laplace_exact(n: int, x: float, params: CriticalParams) -> float:
    """E exp((x/n) Y_n) by exact transform iteration (x <= 0, n >= 1)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return LaplaceIteration(params).value(n, x)


def laplace_via_distribution(n: int, x: float, params: CriticalParams) -> float:
    """Expectation-form value sum_k P(Y_n = k) e^{(x/n) k} from the exact
    level-size distribution; the independent cross-check for small n."""
    from .infinite import exact_Y_distribution

    if x > 0.0:
        raise DomainError("the transform argument must be <= 0")
    dist = exact_Y_distribution(n, params)
    k = np.arange(len(dist.probs))
    return float(np.dot(dist.probs, np.exp((x / n) * k)))


def comparison_iterates(n: int, x: float, mu: float) -> np.ndarray:
    """The explicit comparison sequence y_k = 1 / (n/x - mu*k/2), k = 0..n."""
    if x >= 0.0:
        raise DomainError("x must be < 0")
    k = np.arange(n + 1, dtype=np.float64)
    return 1.0 / (n / x - 0.5 * mu * k)


def gamma2_cdf(t):
    """CDF 1 - e^{-t}(1+t) of the density t e^{-t} on t >= 0."""
    t = np.asarray(t, dtype=np.float64)
    return np.where(t > 0.0, -np.expm1(-t) - t * np.exp(-t), 0.0)


def gamma_limit_test(n: int, samples: int, params: CriticalParams, rng) -> KsResult:
    """KS test of the rescaled level size (2/(mu n)) Y_n against gamma2_cdf."""
    if samples < 1:
        raise DomainError("need at least one sample")
    y = sample_level_sizes(n, params, rng, samples)
    rescaled = y * (2.0 / (params.mu * n))
    return ks_test(rescaled, gamma2_cdf)


@dataclass
class SdePath:
    """Ensemble snapshots of an Euler-Maruyama run.

    values[j] holds the ensemble at times[j]; shape (paths,) for the scalar
    equation, (paths, r) for the group system.
    """

    dt: float
    times: np.ndarray
    values: np.ndarray
    seed_info: str = ""

    def at(self, t: float) -> np.ndarray:
        j = int(np.argmin(np.abs(self.times - t)))
        if abs(float(self.times[j]) - t) > 0.5 * self.dt + 1e-12:
            raise DomainError(f"time {t} was not recorded")
        return self.values[j]


def _record_steps(T_end: float, dt: float, record_times) -> list:
    if dt <= 0.0 or T_end <= 0.0:
        raise DomainError("need dt > 0 and T_end > 0")
    times = [float(t) for t in (record_times if record_times is not None else [T_end])]
    if any(t < 0.0 or t > T_end + 1e-12 for t in times):
        raise DomainError("record times must lie in [0, T_end]")
    steps = [int(round(t / dt)) for t in times]
    if sorted(steps) != steps:
        raise DomainError("record times must be nondecreasing")
    return steps


def simulate_besq(
    T_end: float,
    dt: float,
    params: CriticalParams,
    rng,
    paths: int = 100_000,
    z0: float = 0.0,
    record_times=None,
    seed_info: str = "",
) -> SdePath:
    """Euler-Maruyama ensemble for dZ = mu dt + sqrt(mu max(Z,0)) dW, Z(0)=z0,
    clipped at zero after every step."""
    steps = _record_steps(T_end, dt, record_times)
    z = np.full(paths, float(z0))
    out = []
    done = 0
    for s in steps:
        z = _kernels.euler_scalar(z, params.mu, dt, s - done, rng)
        done = s
        out.append(z.copy())
    return SdePath(
        dt=dt,
        times=np.array([s * dt for s in steps]),
        values=np.array(out),
        seed_info=seed_info,
    )


def simulate_groups(
    r: int,
    v0,
    T_end: float,
    dt: float,
    params: CriticalParams,
    rng,
    paths: int = 10_000,
    record_times=None,
    t_start: float = 0.0,
    seed_info: str = "",
) -> SdePath:
    """Euler-Maruyama ensemble for the group system
    dV_i = mu V_i / sum_j V_j dt + sqrt(mu max(V_i,0)) dW_i (independent W_i)."""
    v0 = np.asarray(v0, dtype=np.float64)
    if v0.ndim == 1:
        v0 = np.tile(v0, (paths, 1))
    if v0.shape != (paths, r):
        raise DomainError(f"v0 must broadcast to shape ({paths}, {r})")
    if np.any(v0 < 0.0) or np.any(v0.sum(axis=1) <= 0.0):
        raise DomainError("initial vectors must be nonnegative with positive sum")
    if t_start < 0.0 or t_start > T_end:
        raise DomainError("t_start must lie in [0, T_end]")
    steps = _record_steps(T_end, dt, record_times)
    start = int(round(t_start / dt))
    if any(s < start for s in steps):
        raise DomainError("record times must not precede t_start")
    V = v0.copy()
    out = []
    done = start
    for s in steps:
        V = _kernels.euler_groups(V, params.mu, dt, s - done, rng)
        done = s
        out.append(V.copy())
    return SdePath(
        dt=dt,
        times=np.array([s * dt for s in steps]),
        values=np.array(out),
        seed_info=seed_info,
    )


@dataclass
class GroupIncrementStats:
    """Per-step drift and raw-product statistics of the group chain.

    drift_mean estimates E[dV_1 - mu V_1 / sum V] (exactly 0 under the
    kernel); cross_mean estimates E[dV_1 * dV_2] (exactly 0 as well, the
    discrete form of vanishing off-diagonal diffusion).  Standard errors
    are valid because the per-step terms are martingale increments.
    """

    n_terms: int
    drift_mean: float
    drift_se: float
    cross_mean: float
    cross_se: float

    @property
    def drift_z(self) -> float:
        return self.drift_mean / self.drift_se if self.drift_se else 0.0

    @property
    def cross_z(self) -> float:
        return self.cross_mean / self.cross_se if self.cross_se else 0.0


def group_increment_stats(
    n_steps: int,
    paths: int,
    params: CriticalParams,
    rng,
    r: int = 2,
    v0=None,
) -> GroupIncrementStats:
    """Run the group chain and accumulate the per-step identities' residuals.

    Starts from one vertex per group by default (any state is valid: the
    identities are conditional on the current state)."""
    if r < 2:
        raise DomainError("need at least two groups for the cross statistic")
    if v0 is None:
        v0 = np.ones((paths, r), dtype=np.int64)
    V = np.array(v0, dtype=np.int64)
    if V.shape != (paths, r):
        raise DomainError(f"v0 must have shape ({paths}, {r})")
    mu = params.mu
    n_terms = 0
    sx = []
    sx2 = []
    sw = []
    sw2 = []
    for _ in range(n_steps):
        k = V.sum(axis=1)
        new = step_group_sizes(V, params, rng)
        dv = new - V
        x = dv[:, 0] - mu * V[:, 0] / k
        w = dv[:, 0] * dv[:, 1]
        sx.append(float(x.sum()))
        sx2.append(float(np.dot(x, x)))
        sw.append(float(w.sum()))
        sw2.append(float(np.dot(w, w)))
        n_terms += len(x)
        V = new
    mean_x = math.fsum(sx) / n_terms
    var_x = max(math.fsum(sx2) / n_terms - mean_x**2, 0.0)
    mean_w = math.fsum(sw) / n_terms
    var_w = max(math.fsum(sw2) / n_terms - mean_w**2, 0.0)
    return GroupIncrementStats(
        n_terms=n_terms,
        drift_mean=mean_x,
        drift_se=math.sqrt(var_x / n_terms),
        cross_mean=mean_w,
        cross_se=math.sqrt(var_w / n_terms),
    )


def _contiguous_split(sizes: np.ndarray, r: int) -> np.ndarray:
    """Vectorized near-equal contiguous split of each size into r groups."""
    i = np.arange(r + 1)
    bounds = (sizes[:, None] * i) // r
    return np.diff(bounds, axis=1).astype(np.int64)


def compare_discrete_vs_sde(
    n: int,
    r: int,
    params: CriticalParams,
    rng,
    paths: int = 2000,
    times=(0.5, 1.0),
    dt: float = 1e-3,
    split_frac: float = 0.25,
):
    """Two-sample KS distances between the rescaled discrete group chain
    V_{i,[nt]}/n and the group SDE V_i(t), coordinate by coordinate.

    Protocol: the size chain runs to n0 = round(split_frac * n) (n0 = 0 for
    r = 1), each path's level is split into r contiguous near-equal groups,
    and the SDE starts from that path's rescaled split at t0 = n0/n.  Paths
    whose level has fewer than r vertices at n0 are dropped and reported.
    """
    if r < 1:
        raise DomainError("r must be >= 1")
    times = sorted(float(t) for t in times)
    n0 = 0 if r == 1 else max(1, int(round(split_frac * n)))
    sizes = np.ones(paths, dtype=np.int64)
    for _ in range(n0):
        sizes = step_level_sizes(sizes, params, rng)
    keep = sizes >= r
    sizes = sizes[keep]
    V = _contiguous_split(sizes, r)

    record_steps = [int(round(t * n)) for t in times]
    if any(s < n0 for s in record_steps):
        raise DomainError("record times must not precede the split point")
    discrete = []
    done = n0
    for s in record_steps:
        for _ in range(s - done):
            V = step_group_sizes(V, params, rng)
        done = s
        discrete.append(V / n)

    sde = simulate_groups(
        r,
        _contiguous_split(sizes, r) / n,
        T_end=max(times),
        dt=dt,
        params=params,
        rng=rng,
        paths=len(sizes),
        record_times=times,
        t_start=n0 / n,
    )

    rows = []
    for j, t in enumerate(times):
        for i in range(r):
            ks = ks_two_sample(discrete[j][:, i], sde.values[j][:, i])
            rows.append(
                {
                    "t": float(t),
                    "coordinate": i,
                    "ks_statistic": ks.statistic,
                    "pvalue": ks.pvalue,
                    "paths_used": len(sizes),
                    "paths_dropped": int(paths - len(sizes)),
                }
            )
    return rows
