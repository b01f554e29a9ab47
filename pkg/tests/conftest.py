"""Shared fixtures and random-model helpers."""

from __future__ import annotations

import numpy as np
import pytest

from treegibbs.model import EnergyModel, critical_params


def random_model(rng, D_low=2, D_high=6, e_scale=3.0, beta_scale=2.0) -> EnergyModel:
    """Random valid model: D in [D_low, D_high], E_i in [-e_scale, e_scale],
    beta in [-beta_scale, beta_scale]."""
    D = int(rng.integers(D_low, D_high + 1))
    E = tuple(rng.uniform(-e_scale, e_scale, size=D + 1))
    beta = float(rng.uniform(-beta_scale, beta_scale))
    return EnergyModel(D=D, E=E, beta=beta)


@pytest.fixture(scope="session")
def uniform2():
    """D=2, beta=0 critical parameters: rho=1, C=sigma=1/3, mu=2/3."""
    return critical_params(EnergyModel(D=2, E=(0.0, 0.0, 0.0), beta=0.0))


@pytest.fixture(scope="session")
def uniform3():
    """D=3, beta=0 critical parameters."""
    return critical_params(EnergyModel(D=3, E=(0.0, 0.0, 0.0, 0.0), beta=0.0))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
