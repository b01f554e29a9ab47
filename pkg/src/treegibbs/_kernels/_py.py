"""Pure-NumPy kernel backend.

Vectorizes each hot-loop primitive across the batch (lockstep trajectories)
so it stays usable when the compiled extension is unavailable.  Must match
the compiled backend's API and sampling *law* exactly; the two backends
consume the underlying bit stream in different orders, so outputs for a
given seed agree in distribution, not bitwise.
"""

from __future__ import annotations

import numpy as np

IS_COMPILED = False
NAME = "python"


def _size_biased(p_star: np.ndarray) -> np.ndarray:
    h = np.arange(len(p_star)) * p_star
    return h / h.sum()


def step_sizes(sizes: np.ndarray, p_star: np.ndarray, rng) -> np.ndarray:
    """One step of the level-size chain for a batch of sizes.

    Next size = one size-biased offspring draw + sum of (k-1) iid p* draws;
    the sum is realized through a multinomial per path.
    """
    sizes = np.asarray(sizes, dtype=np.int64)
    p_star = np.asarray(p_star, dtype=np.float64)
    if np.any(sizes < 1):
        raise ValueError("level sizes must be >= 1")
    degrees = np.arange(len(p_star), dtype=np.int64)
    counts = rng.multinomial(sizes - 1, p_star)
    special = rng.choice(len(p_star), size=len(sizes), p=_size_biased(p_star))
    return counts @ degrees + special


def step_groups(V: np.ndarray, p_star: np.ndarray, rng) -> np.ndarray:
    """One chain step for batched per-group progeny counts of shape (paths, r).

    The special vertex lands in group i with probability V_i / sum(V); each
    group's remaining vertices contribute an iid p* offspring sum.
    """
    V = np.asarray(V, dtype=np.int64)
    p_star = np.asarray(p_star, dtype=np.float64)
    paths, r = V.shape
    k = V.sum(axis=1)
    if np.any(k < 1):
        raise ValueError("total level size must be >= 1")
    degrees = np.arange(len(p_star), dtype=np.int64)
    # special group ~ V_i / k via one uniform per path
    u = rng.random(paths) * k
    pick = (np.cumsum(V, axis=1) <= u[:, None]).sum(axis=1)
    pick = np.minimum(pick, r - 1)
    plain = V.copy()
    plain[np.arange(paths), pick] -= 1
    out = np.empty_like(V)
    for i in range(r):
        out[:, i] = rng.multinomial(plain[:, i], p_star) @ degrees
    special = rng.choice(len(p_star), size=paths, p=_size_biased(p_star))
    out[np.arange(paths), pick] += special
    return out


def euler_scalar(
    z: np.ndarray, mu: float, dt: float, n_steps: int, rng
) -> np.ndarray:
    """n_steps of Euler-Maruyama for dZ = mu dt + sqrt(mu max(Z,0)) dW,
    clipping at 0 after each step."""
    z = np.array(z, dtype=np.float64, copy=True)
    root_dt = np.sqrt(dt)
    for _ in range(n_steps):
        noise = rng.standard_normal(len(z))
        z += mu * dt + np.sqrt(mu * np.maximum(z, 0.0)) * root_dt * noise
        np.maximum(z, 0.0, out=z)
    return z


def euler_groups(
    V: np.ndarray, mu: float, dt: float, n_steps: int, rng
) -> np.ndarray:
    """Euler-Maruyama for the coupled system dV_i = mu V_i / sum(V) dt
    + sqrt(mu max(V_i,0)) dW_i with independent noises, clipped at 0.

    When a path's total hits 0 the drift is split evenly (consistent with
    the scalar equation at r = 1, whose drift is mu everywhere).
    """
    V = np.array(V, dtype=np.float64, copy=True)
    paths, r = V.shape
    root_dt = np.sqrt(dt)
    for _ in range(n_steps):
        total = V.sum(axis=1, keepdims=True)
        share = np.where(total > 0.0, V / np.where(total > 0.0, total, 1.0), 1.0 / r)
        noise = rng.standard_normal((paths, r))
        V += mu * share * dt + np.sqrt(mu * np.maximum(V, 0.0)) * root_dt * noise
        np.maximum(V, 0.0, out=V)
    return V
