"""Acceptance suite: one check per shipped guarantee, at full scale.

Each test prints a [PASS]/[FAIL] line with the measured quantities (visible
with `pytest -s` or on failure).  Thresholds are fixed here, not tuned at
run time; Monte Carlo checks use pinned seeds via the package's stream
derivation, so reruns are deterministic for a given kernel backend.
"""

import itertools
import math
import time

import numpy as np
import pytest

from treegibbs.asymptotics import (
    gamma2_cdf,
    group_increment_stats,
    laplace_exact,
    laplace_via_distribution,
    simulate_besq,
)
from treegibbs.counting import WeightedCountTable, forest_count, pushforward_finite
from treegibbs.infinite import (
    conditional_moment_exhaustive,
    conditional_moment_formula,
    sample_level_sizes,
    sample_offspring_counts,
    transition_prob,
)
from treegibbs.limits import limit_log_prob, check_consistency, tv_distance
from treegibbs.model import EnergyModel, critical_params
from treegibbs.neighborhoods import enumerate_neighborhoods
from treegibbs.seeding import make_rng
from treegibbs.stats import chi2_gof, ks_test, ks_two_sample
from treegibbs.trees import enumerate_trees

from conftest import random_model

ACCEPT_SEED = 90210


def report(ok: bool, label: str, detail: str) -> bool:
    print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    return ok


@pytest.fixture(scope="module")
def uniform2():
    return critical_params(EnergyModel(D=2, E=(0.0, 0.0, 0.0), beta=0.0))


@pytest.fixture(scope="module")
def gamma_sample(uniform2):
    """Rescaled level sizes (2/(mu n)) Y_n at n=500, 1e5 trajectories."""
    start = time.perf_counter()
    y = sample_level_sizes(500, uniform2, make_rng(ACCEPT_SEED, "accept-gamma"), 100_000)
    elapsed = time.perf_counter() - start
    return y * 2.0 / (uniform2.mu * 500), elapsed


def test_01_variational_solver_closed_form(uniform2):
    model = EnergyModel(D=2, E=(0.0, 0.0, 0.0), beta=0.0)
    critical_params(model)  # warm-up
    best = math.inf
    for _ in range(5):
        start = time.perf_counter()
        params = critical_params(model)
        best = min(best, time.perf_counter() - start)
    errs = {
        "rho": abs(params.rho - 1.0),
        "C": abs(params.C - 1 / 3),
        "sigma": abs(params.sigma - 1 / 3),
        "mu": abs(params.mu - 2 / 3),
    }
    ok = all(v < 1e-10 for v in errs.values()) and best < 1e-3
    assert report(
        ok,
        "variational solver closed form",
        f"max err {max(errs.values()):.2e}, runtime {best * 1e3:.3f} ms",
    )


def test_02_enumeration_counts():
    start = time.perf_counter()
    n4 = sum(1 for _ in enumerate_trees(4, 3))
    catalan_ok = True
    for N in range(1, 13):
        expected = math.comb(2 * (N - 1), N - 1) // N  # Catalan(N-1)
        got = sum(1 for _ in enumerate_trees(N, max(N - 1, 1)))
        catalan_ok = catalan_ok and got == expected
    elapsed = time.perf_counter() - start
    ok = n4 == 5 and catalan_ok and elapsed < 10.0
    assert report(
        ok,
        "plane tree enumeration",
        f"|T_4(3)|={n4}, Catalan match up to N=12: {catalan_ok}, {elapsed:.2f} s",
    )


def _forest_profiles(N, k):
    """Explicit forest enumeration grouped by degree profile."""
    profiles = {}
    for sizes in itertools.product(range(1, N - k + 2), repeat=k):
        if sum(sizes) != N:
            continue
        for forest in itertools.product(
            *[list(enumerate_trees(s, max(s - 1, 1))) for s in sizes]
        ):
            prof = [0] * N
            stack = list(forest)
            while stack:
                node = stack.pop()
                prof[len(node)] += 1
                stack.extend(node)
            key = tuple(prof)
            profiles[key] = profiles.get(key, 0) + 1
    return profiles


def _feasible_profiles(N, k):
    """All degree profiles with sum r = N and sum i*r_i = N - k."""

    def rec(degree, vertices_left, edges_left):
        if degree == 0:
            if edges_left == 0 and vertices_left >= 0:
                yield (vertices_left,)
            return
        for r in range(0, min(vertices_left, edges_left // degree) + 1):
            for rest in rec(degree - 1, vertices_left - r, edges_left - degree * r):
                yield rest + (r,)

    yield from rec(N - 1, N, N - k)


def test_03_forest_formula_exact():
    checked = 0
    ok = True
    for N in range(1, 9):
        for k in range(1, N + 1):
            profiles = _forest_profiles(N, k)
            feasible = set(_feasible_profiles(N, k))
            # enumeration never produces an infeasible profile
            ok = ok and set(profiles) <= feasible
            for prof in feasible:
                ok = ok and forest_count(N, k, prof) == profiles.get(prof, 0)
                checked += 1
    assert report(ok, "forest count formula", f"{checked} (N,k,profile) cases, exact")


def test_04_ratio_convergence_improves():
    rng = np.random.default_rng(ACCEPT_SEED)
    improved = 0
    total = 0
    for _ in range(20):
        model = random_model(rng, D_low=2, D_high=3, e_scale=1.0, beta_scale=1.0)
        params = critical_params(model)
        table = WeightedCountTable(model, 10)
        atoms = enumerate_neighborhoods(1, model.D)
        dists = {
            N: pushforward_finite(N, 1, model, table=table, atoms=atoms)
            for N in (6, 10)
        }
        for a, b in itertools.combinations(atoms, 2):
            limit = math.exp(limit_log_prob(a, params) - limit_log_prob(b, params))
            gaps = {
                N: abs(dists[N][a] / dists[N][b] / limit - 1.0) for N in (6, 10)
            }
            improved += gaps[10] < gaps[6]
            total += 1
    frac = improved / total
    assert report(
        frac >= 0.9,
        "projection ratios approach the limit",
        f"{improved}/{total} atom pairs improved from N=6 to N=10 ({frac:.0%})",
    )


def test_05_tv_convergence():
    start = time.perf_counter()
    ok = True
    details = []
    for beta in (-0.5, 0.0, 0.5):
        model = EnergyModel(D=2, E=(0.0, 0.0, 0.0), beta=beta)
        params = critical_params(model)
        table = WeightedCountTable(model, 512)
        atoms = enumerate_neighborhoods(1, 2)
        Ns = [16, 32, 64, 128, 256, 512]
        tvs = [
            tv_distance(N, 1, model, params=params, table=table, atoms=atoms)
            for N in Ns
        ]
        inversions = sum(1 for x, y in zip(tvs, tvs[1:]) if y > x)
        ok = ok and inversions <= 1 and tvs[-1] < tvs[0] / 3.0
        details.append(f"beta={beta}: tv16={tvs[0]:.4g} tv512={tvs[-1]:.4g} inv={inversions}")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 60.0
    assert report(ok, "total-variation convergence", "; ".join(details) + f", {elapsed:.1f} s")


def test_06_consistency_across_heights():
    start = time.perf_counter()
    rng = np.random.default_rng(ACCEPT_SEED + 1)
    worst = 0.0
    for _ in range(100):
        model = random_model(rng, D_low=2, D_high=3)
        params = critical_params(model)
        for n in (1, 2):
            worst = max(worst, check_consistency(n, params))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 60.0
    assert report(
        ok,
        "tower consistency of limit measures",
        f"max defect {worst:.2e} over 100 models at n=1,2, {elapsed:.1f} s",
    )


def test_07_level_kernel_normalization_and_sampler_fit(uniform2):
    rng = np.random.default_rng(ACCEPT_SEED + 2)
    worst = 0.0
    for _ in range(5):
        model = random_model(rng, D_low=2, D_high=3)
        params = critical_params(model)
        for k in (1, 2, 3):
            g = np.ones(k, dtype=np.int64)
            total = math.fsum(
                transition_prob(
                    g, np.repeat(np.arange(1, k + 1), counts), params
                )
                for counts in itertools.product(range(model.D + 1), repeat=k)
            )
            worst = max(worst, abs(total - 1.0))
    norm_ok = worst < 1e-10

    draw_rng = make_rng(ACCEPT_SEED, "accept-kernel-fit")
    pvals = []
    for k in (1, 2, 3):
        counts = sample_offspring_counts(k, uniform2, draw_rng, size=1_000_000)
        radix = (uniform2.D + 1) ** np.arange(k)
        ids = counts @ radix
        observed = np.bincount(ids, minlength=(uniform2.D + 1) ** k).astype(float)
        probs = np.zeros((uniform2.D + 1) ** k)
        g = np.ones(k, dtype=np.int64)
        for vec in itertools.product(range(uniform2.D + 1), repeat=k):
            idx = int(np.dot(vec, radix))
            probs[idx] = transition_prob(
                g, np.repeat(np.arange(1, k + 1), vec), uniform2
            )
        pvals.append(chi2_gof(observed, probs).pvalue)
    fit_ok = all(p > 0.001 for p in pvals)
    assert report(
        norm_ok and fit_ok,
        "level kernel normalization and sampler fit",
        f"max |1-sum| {worst:.2e}; chi2 p-values {[f'{p:.3f}' for p in pvals]} at 1e6 draws",
    )


def test_08_conditional_moment_identities():
    rng = np.random.default_rng(ACCEPT_SEED + 3)
    worst = 0.0
    for _ in range(20):
        model = random_model(rng, D_low=2, D_high=4, e_scale=2.0, beta_scale=1.5)
        params = critical_params(model)
        for k in range(1, 5):
            for order in range(1, 5):
                f = conditional_moment_formula(k, order, params)
                e = conditional_moment_exhaustive(k, order, params)
                worst = max(worst, abs(f - e) / max(abs(f), 1.0))
    ok = worst < 1e-10
    assert report(
        ok,
        "conditional moment formulas",
        f"worst relative gap {worst:.2e} over 20 models, k<=4, orders 1..4",
    )


def test_09_laplace_iteration(uniform2):
    gaps = [
        abs(laplace_exact(n, -1.0, uniform2) - laplace_via_distribution(n, -1.0, uniform2))
        for n in range(1, 11)
    ]
    value = laplace_exact(10_000, -1.0, uniform2)
    limit_err = abs(value - 9.0 / 16.0)
    ok = max(gaps) < 1e-9 and limit_err < 5e-3
    assert report(
        ok,
        "Laplace transform iteration",
        f"oracle gap {max(gaps):.2e} (n<=10); |L_1e4 - 9/16| = {limit_err:.2e}",
    )


def test_10_gamma_limit_monte_carlo(gamma_sample):
    rescaled, elapsed = gamma_sample
    result = ks_test(rescaled, gamma2_cdf)
    mean = float(rescaled.mean())
    ok = result.statistic < 0.02 and elapsed < 300.0 and abs(mean - 2.0) < 0.04
    assert report(
        ok,
        "gamma limit of rescaled level sizes",
        f"KS {result.statistic:.4f} (<0.02), mean {mean:.3f} (~2), "
        f"sampling {elapsed:.1f} s at n=500, 1e5 paths",
    )


def test_11_diffusion_approximation(uniform2, gamma_sample):
    mu = uniform2.mu
    start = time.perf_counter()
    path = simulate_besq(
        1.0, 1e-3, uniform2, make_rng(ACCEPT_SEED, "accept-besq"), paths=100_000
    )
    elapsed = time.perf_counter() - start
    z = path.at(1.0)
    mean_err = abs(float(z.mean()) - mu) / mu
    rescaled_z = z * 2.0 / mu
    ks_gamma = ks_test(rescaled_z, gamma2_cdf)
    ks_pair = ks_two_sample(rescaled_z, gamma_sample[0])
    ok = mean_err < 0.01 and ks_gamma.statistic < 0.02 and ks_pair.statistic < 0.03
    assert report(
        ok,
        "diffusion marginal at t=1",
        f"mean rel err {mean_err:.4f} (<0.01), KS vs gamma {ks_gamma.statistic:.4f} "
        f"(<0.02), two-sample vs discrete {ks_pair.statistic:.4f} (<0.03), {elapsed:.1f} s",
    )


def test_12_group_drift_and_cross_terms(uniform2):
    start = time.perf_counter()
    stats = group_increment_stats(
        400, 10_000, uniform2, make_rng(ACCEPT_SEED, "accept-groups"), r=2
    )
    elapsed = time.perf_counter() - start
    ok = abs(stats.drift_z) < 3.0 and abs(stats.cross_z) < 3.0
    assert report(
        ok,
        "group drift and off-diagonal covariation",
        f"drift z={stats.drift_z:+.2f}, cross z={stats.cross_z:+.2f} "
        f"over {stats.n_terms} increments, {elapsed:.1f} s",
    )
