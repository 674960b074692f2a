"""Suprema of infinitely divisible processes on finite atomic measures.

Scenario files describe a finite symmetric atomic measure and a finite family
of functions; the package simulates the induced process by its series
representation, computes the chaining functionals and labeled partition trees
that bound E sup X_t from both sides, and runs the empirical checks tying the
two together.
"""

from .scenario import (
    FunctionFamily,
    MeasureSpace,
    ScenarioConfig,
    ScenarioError,
    load_scenario,
    make_example_ex,
    random_scenario,
    save_scenario,
)
from .mc import (
    McEstimate,
    estimate_esup,
    estimate_exp_moment,
    estimate_point_sum,
    mc_estimate,
    replication_ensemble,
)
from .metrics import DistanceMatrix, PhiFamily, RandomPhi, compute_d2, compute_dinf
from .measures import (
    LabelProfile,
    MeasureOnT,
    J_mu,
    J_values,
    compute_j0,
    find_mu0,
    label_profile,
    measure_search,
    mix_measures,
    uniform_measure,
)
from .partitions import (
    Cell,
    GammaValue,
    PartitionTree,
    beta_functional,
    build_partition_tree,
    gamma_exact,
    gamma_greedy,
    greedy_cover,
    validate_tree,
)
from .checks import (
    CHECKS,
    CheckResult,
    SandwichReport,
    run_sandwich,
    run_scenario_checks,
)

__version__ = "0.1.0"

__all__ = [
    "FunctionFamily",
    "MeasureSpace",
    "ScenarioConfig",
    "ScenarioError",
    "load_scenario",
    "save_scenario",
    "make_example_ex",
    "random_scenario",
    "McEstimate",
    "replication_ensemble",
    "mc_estimate",
    "estimate_esup",
    "estimate_point_sum",
    "estimate_exp_moment",
    "DistanceMatrix",
    "PhiFamily",
    "RandomPhi",
    "compute_d2",
    "compute_dinf",
    "MeasureOnT",
    "LabelProfile",
    "uniform_measure",
    "compute_j0",
    "label_profile",
    "J_values",
    "J_mu",
    "mix_measures",
    "find_mu0",
    "measure_search",
    "Cell",
    "PartitionTree",
    "GammaValue",
    "greedy_cover",
    "build_partition_tree",
    "validate_tree",
    "beta_functional",
    "gamma_exact",
    "gamma_greedy",
    "CHECKS",
    "CheckResult",
    "SandwichReport",
    "run_scenario_checks",
    "run_sandwich",
    "__version__",
]
