"""Local-search maximization of non-negative submodular functions under
matroid, knapsack and matroid-base constraints, with brute-force verifiers."""

from .base_search import BaseConstraint, exact_cardinality, swap_base_search, two_base_algorithm
from .errors import *  # noqa: F401,F403
from .estimators import (
    BaseMaximizer,
    CardinalityMaximizer,
    KMatroidMaximizer,
    KnapsackMaximizer,
    PartitionMatroidMaximizer,
)
from .ground import (
    GroundSet,
    SubmodularOracle,
    build_coverage,
    build_cut,
    build_explicit_table,
    build_facility_location,
    build_modular,
    complement_oracle,
    validate_submodular,
)
from .instances import InstanceFile, gen_base_counterexample, gen_greedy_tight, gen_random
from .knapsack import (
    FracSearchConfig,
    KnapsackSystem,
    classify_heavy_light,
    enumerate_heavy,
    fractional_local_search,
    knapsack_algorithm,
    randomized_round,
    solve_fractional,
)
from .matroid import (
    ExplicitMatroid,
    GraphicMatroid,
    PartitionMatroid,
    UniformMatroid,
    contract,
    exchange_map,
    find_two_disjoint_bases,
    is_independent,
    rank,
)
from .multilinear import (
    Evaluator,
    FractionalPoint,
    ScaledOracle,
    eval_exact,
    eval_mc,
    eval_table,
    lift_scaled,
    partial_derivative,
)
from .runner import RunConfig, RunRecord, replay, run_experiment
from .search import (
    SearchConfig,
    SolutionReport,
    algorithm_a,
    greedy_baseline,
    p_exchange_search,
    partition_algorithm,
    procedure_b,
    symmetric_algorithm,
)
from .verify import (
    FeasibilityPredicate,
    brute_force_opt,
    certify_fractional_lemma,
    certify_matroid_local_lemma,
    certify_partition_lemma,
    measure_ratio,
)

__version__ = "0.1.0"
