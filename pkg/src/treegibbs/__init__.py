"""Gibbs ensembles on bounded-branching plane trees.

Exact finite-size enumeration and projections, the closed-form limiting
neighborhood measures, the infinite Markov tree and its level-size chain,
and the gamma / diffusion approximations of level growth, with a CLI
harness for reproducible experiment runs.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .asymptotics import (
    LaplaceIteration,
    SdePath,
    compare_discrete_vs_sde,
    comparison_iterates,
    gamma2_cdf,
    gamma_limit_test,
    group_increment_stats,
    laplace_exact,
    laplace_via_distribution,
    simulate_besq,
    simulate_groups,
)
from .counting import (
    WeightedCountTable,
    forest_count,
    partition_function,
    pushforward_finite,
)
from .errors import (
    DomainError,
    EmptySupportError,
    InvalidModelError,
    ResourceLimitError,
    TreeGibbsError,
)
from .infinite import (
    GroupLabeling,
    TreeTrajectory,
    YDistribution,
    conditional_moment_exhaustive,
    conditional_moment_formula,
    contiguous_labeling,
    exact_Y_distribution,
    level_energy,
    sample_level_sizes,
    sample_next_level,
    sample_trajectory,
    size_transition_prob,
    size_transition_row,
    track_progeny,
    transition_prob,
)
from .limits import check_consistency, limit_prob, ratio_check, tv_distance
from .model import (
    CriticalParams,
    EnergyModel,
    critical_params,
    moments,
    rate_function_J,
    solve_rho,
)
from .neighborhoods import (
    NeighborhoodTree,
    enumerate_neighborhoods,
    neighborhood_from_tree,
)
from .seeding import DEFAULT_SEED, make_rng
from .trees import enumerate_trees, parse_tree, serialize_tree, tree_energy

__version__ = "0.1.0"
