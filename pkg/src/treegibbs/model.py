"""Energy model on bounded-branching plane trees and its critical parameters.

A model assigns an energy E_i to every branching number i = 0..D and an
inverse temperature beta.  The convex rate function

    J(p) = -H(p) + beta * E(p)

on the simplex Delta = {p >= 0 : sum p_i = 1, sum i*p_i = 1} has a unique
minimizer p*, of the form p*_i = C * exp(-beta*E_i) * rho^i.  Everything
downstream (limit measures, Markov kernels, diffusion coefficients) is a
function of the derived constants (rho, C, sigma, p*, moments B_n, mu)
computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidModelError

__all__ = [
    "EnergyModel",
    "CriticalParams",
    "solve_rho",
    "critical_params",
    "rate_function_J",
    "moments",
]


@dataclass(frozen=True)
class EnergyModel:
    """Branching bound D, per-degree energies E_0..E_D, inverse temperature."""

    D: int
    E: tuple
    beta: float

    def __post_init__(self):
        if not isinstance(self.D, (int, np.integer)) or isinstance(self.D, bool):
            raise InvalidModelError("D must be an integer")
        if self.D < 2:
            raise InvalidModelError(
                "D must be >= 2: with D = 1 the simplex constraint sum(i*p_i) = 1 "
                "pins p = (0, 1), so no interior critical point exists"
            )
        energies = tuple(float(e) for e in self.E)
        if len(energies) != self.D + 1:
            raise InvalidModelError(
                f"E must have D+1 = {self.D + 1} entries, got {len(energies)}"
            )
        if not all(math.isfinite(e) for e in energies):
            raise InvalidModelError("all energies must be finite")
        if not math.isfinite(float(self.beta)):
            raise InvalidModelError("beta must be finite")
        object.__setattr__(self, "E", energies)
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "D", int(self.D))

    @property
    def log_weights(self) -> np.ndarray:
        """log of the Boltzmann weight per branching number, -beta * E_i."""
        return -self.beta * np.asarray(self.E, dtype=np.float64)


def _log_balance_gap(t: float, log_w: np.ndarray) -> float:
    """log(sum_{i>=2} (i-1) w_i rho^i) - log(w_0) at rho = e^t.

    Monotone increasing in t; its root is the critical rho.  Evaluated in
    pure log space so that rho^i never overflows.
    """
    terms = [math.log(i - 1) + log_w[i] + i * t for i in range(2, len(log_w))]
    m = max(terms)
    s = sum(math.exp(v - m) for v in terms)
    return m + math.log(s) - log_w[0]


def solve_rho(model: EnergyModel) -> float:
    """Solve sum_i w_i rho^i = sum_i i w_i rho^i for the unique rho > 0.

    Equivalently finds the root of h(rho) = sum (i-1) w_i rho^i, which is
    nondecreasing with h(0) = -w_0 < 0, so bisection (here on log rho, to
    stay overflow-safe for extreme beta*E) is unconditionally convergent.
    """
    if not isinstance(model, EnergyModel):
        model = EnergyModel(*model)
    log_w = model.log_weights
    # A uniform shift of E (= rescaling all weights) does not move the root.
    log_w = log_w - log_w.max()

    lo, hi = 0.0, 0.0
    step = 1.0
    while _log_balance_gap(lo, log_w) > 0.0:
        lo -= step
        step *= 2.0
    step = 1.0
    while _log_balance_gap(hi, log_w) < 0.0:
        hi += step
        step *= 2.0
    # 1e-14 on log rho ~ 1e-14 relative on rho, beating the 1e-13 target.
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _log_balance_gap(mid, log_w) < 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    gap = _log_balance_gap(t, log_w)
    # |gap|/2 ~ |h(rho)| relative to the balancing sums.
    if abs(gap) > 1e-11:
        raise InvalidModelError(f"rho solver failed to converge (residual {gap:.3e})")
    return math.exp(t)


def rate_function_J(p, model: EnergyModel) -> float:
    """Rate function J(p) = -H(p) + beta * E(p) on the probability simplex.

    Uses the 0*log(0) = 0 convention so boundary points are valid.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or len(p) != model.D + 1:
        raise DomainError(f"p must have {model.D + 1} entries")
    if np.any(p < 0.0):
        raise DomainError("p must be entrywise nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise DomainError(f"p must sum to 1, got {p.sum()!r}")
    pos = p > 0.0
    neg_entropy = float(np.sum(p[pos] * np.log(p[pos])))
    energy = float(np.dot(p, model.E))
    return neg_entropy + model.beta * energy


def moments(p) -> tuple:
    """Power moments B_n = sum_i i^n p_i for n = 1..5, and mu = B_2 - 1."""
    p_star = np.asarray(getattr(p, "p_star", p), dtype=np.float64)
    i = np.arange(len(p_star), dtype=np.float64)
    B = np.array([float(np.dot(i**n, p_star)) for n in range(1, 6)])
    mu = float(B[1]) - 1.0
    return B, mu


@dataclass(frozen=True)
class CriticalParams:
    """All constants derived from the minimizer of J on Delta.

    B[j] stores the moment of order j+1, i.e. B[0] = B_1 = 1.  The log-space
    fields carry the exact relations log_sigma = log_rho + log_C and are what
    the measure/kernel evaluations use internally.
    """

    model: EnergyModel
    rho: float
    C: float
    sigma: float
    J_star: float
    p_star: np.ndarray
    B: np.ndarray
    mu: float
    log_rho: float = field(repr=False, default=0.0)
    log_C: float = field(repr=False, default=0.0)
    log_sigma: float = field(repr=False, default=0.0)

    @property
    def D(self) -> int:
        return self.model.D

    def to_record(self) -> dict:
        """Flat record (JSON object / CSV row) of every derived constant."""
        rec = {
            "rho": self.rho,
            "C": self.C,
            "sigma": self.sigma,
            "J_star": self.J_star,
            "mu": self.mu,
        }
        for i, v in enumerate(self.p_star):
            rec[f"p_star[{i}]"] = float(v)
        for n, v in enumerate(self.B, start=1):
            rec[f"B[{n}]"] = float(v)
        return rec


def critical_params(model: EnergyModel) -> CriticalParams:
    """Minimize J over Delta in closed form via the critical rho.

    Returns p*_i = C w_i rho^i together with rho, C, sigma = e^{J(p*)},
    the moments B_1..B_5 and mu = B_2 - 1.
    """
    rho = solve_rho(model)
    log_rho = math.log(rho)
    log_w = model.log_weights
    i = np.arange(model.D + 1, dtype=np.float64)
    log_terms = log_w + i * log_rho
    m = log_terms.max()
    norm = float(np.exp(log_terms - m).sum())
    log_C = -(m + math.log(norm))
    p_star = np.exp(log_terms - m) / norm
    J_star = rate_function_J(p_star, model)
    B, mu = moments(p_star)
    # sigma is taken from the identity sigma = rho * C (exact in floats) so
    # normalization sums downstream telescope cleanly; it agrees with
    # e^{J(p*)} to roundoff, which a test pins.
    log_sigma = log_rho + log_C
    return CriticalParams(
        model=model,
        rho=rho,
        C=math.exp(log_C),
        sigma=math.exp(log_sigma),
        J_star=J_star,
        p_star=p_star,
        B=B,
        mu=mu,
        log_rho=log_rho,
        log_C=log_C,
        log_sigma=log_sigma,
    )
