"""Critical-window structure of random graphs with constrained degrees.

Degree sets, critical thresholds, window predictions, exact uniform sampling,
kernel-based structure statistics, and a reproducible experiment harness.
"""

from .asymptotics import (
    TheoryPrediction,
    TwoPathConstants,
    VARIANTS,
    bigA_classical,
    bigA_delta,
    bigB,
    excess_distribution,
    expected_attempts,
    planar_c,
    planarity_probability,
    predict,
    rejection_rate,
    survival_probability,
    twopath_constants,
    wright_e,
)
from .critical import (
    CriticalPoint,
    PetrovProfile,
    critical_point,
    h_eval,
    petrov_profile,
    root1,
    tree_T,
    unicycle_V,
    unrooted_U,
)
from .degset import (
    ConditionReport,
    DegreeSet,
    check_condition_C,
    parse_degree_set,
    periodicity,
    phi0,
    phi1,
)
from .errors import (
    ConvergenceError,
    DegreeSetError,
    InfeasibleError,
    MaxAttemptsError,
    NoCriticalPointError,
    OutOfRangeError,
    SingularityError,
    StatisticalFailure,
    TruncationUnstableError,
)
from .graph import (
    Graph,
    KernelMultigraph,
    compensation_factor,
    components,
    kernel,
    read_jsonl,
    two_core,
    write_jsonl,
)
from .harness import (
    ExperimentConfig,
    PointAggregate,
    ResultTable,
    TheoryReport,
    TrialRow,
    compare_theory,
    parse_csv,
    run_experiment,
)
from .sampler import (
    DPTable,
    build_dp,
    edges_for_mu,
    exact_sequence_probability,
    pair_configuration,
    sample_batch,
    sample_degree_sequence,
    sample_simple_graph,
    step_distribution,
    trial_generator,
)
from .stats import GraphSummary, circumference, diameter, is_planar, longest_path, summarize
from .verify import VerifyReport, run_verify

__version__ = "0.1.0"

__all__ = [
    "ConditionReport",
    "ConvergenceError",
    "CriticalPoint",
    "DegreeSet",
    "DegreeSetError",
    "DPTable",
    "ExperimentConfig",
    "Graph",
    "GraphSummary",
    "InfeasibleError",
    "KernelMultigraph",
    "MaxAttemptsError",
    "NoCriticalPointError",
    "OutOfRangeError",
    "PetrovProfile",
    "PointAggregate",
    "ResultTable",
    "SingularityError",
    "StatisticalFailure",
    "TheoryPrediction",
    "TheoryReport",
    "TrialRow",
    "TruncationUnstableError",
    "TwoPathConstants",
    "VARIANTS",
    "VerifyReport",
    "bigA_classical",
    "bigA_delta",
    "bigB",
    "build_dp",
    "check_condition_C",
    "circumference",
    "compare_theory",
    "compensation_factor",
    "components",
    "critical_point",
    "diameter",
    "edges_for_mu",
    "exact_sequence_probability",
    "excess_distribution",
    "expected_attempts",
    "h_eval",
    "is_planar",
    "kernel",
    "longest_path",
    "pair_configuration",
    "parse_csv",
    "parse_degree_set",
    "periodicity",
    "petrov_profile",
    "phi0",
    "phi1",
    "planar_c",
    "planarity_probability",
    "predict",
    "read_jsonl",
    "rejection_rate",
    "root1",
    "run_experiment",
    "run_verify",
    "sample_batch",
    "sample_degree_sequence",
    "sample_simple_graph",
    "step_distribution",
    "summarize",
    "survival_probability",
    "trial_generator",
    "tree_T",
    "twopath_constants",
    "two_core",
    "unicycle_V",
    "unrooted_U",
    "wright_e",
    "write_jsonl",
]
