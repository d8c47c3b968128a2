"""Directed preferential attachment: simulation, exact finite-t
references, and limit-formula evaluation.

The growth process adds one edge per step.  With probability alpha a
new vertex points at an existing one (chosen by in-degree), with
probability gamma an existing vertex (chosen by out-degree) points at
a new one, and with probability beta = 1 - alpha - gamma an edge is
added between existing vertices, source and target chosen
independently.  Attachment weights are degree + delta_in (targets)
and degree + delta_out (sources); loops and parallel edges are kept.
"""

from .core import (
    DirectedMultigraph,
    EndpointRangeError,
    GraphFormatError,
    ModelParams,
    NoVertexGrowthError,
    ParamError,
    ProbabilityRangeError,
    ProbabilitySumError,
    SeedEdgeError,
    SeedGraph,
    default_seed,
    load_graph,
    save_graph,
    validate_params,
)
from .generator import GenState, generate, init_state, make_rng, step
from .stats import (
    DegreeHistogram,
    EdgeDegreeJointCounts,
    degree_histogram,
    edge_joint_counts,
    read_histogram_csv,
    read_joint_csv,
    write_histogram_csv,
    write_joint_csv,
    x_count,
)
from .theory import (
    AsymptoteResult,
    DegenerateRegimeError,
    I1,
    I2,
    QuadratureError,
    QuadratureSpec,
    TheoryParams,
    c_X,
    c_X_asymptote,
    c_in_of,
    c_out_of,
    derive_theory,
    f_in,
    f_out,
    fbar,
    g_edge_density,
    kappa,
    kappa_dc2,
    kappa_limit,
    tail_exponent,
)
from .oracle import (
    DPTable,
    ExactDistribution,
    OracleResourceError,
    dp_D2,
    dp_E_in,
    dp_E_out,
    dp_EX,
    enumerate_exact,
    mix_binomial,
)
from .harness import (
    ComparisonReport,
    RunConfig,
    check_theorem2,
    check_theorem4,
    compare_theory_vs_oracle,
    run_experiment,
    run_trajectories,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoteResult",
    "ComparisonReport",
    "DegenerateRegimeError",
    "DegreeHistogram",
    "DirectedMultigraph",
    "DPTable",
    "EdgeDegreeJointCounts",
    "EndpointRangeError",
    "ExactDistribution",
    "GenState",
    "GraphFormatError",
    "I1",
    "I2",
    "ModelParams",
    "NoVertexGrowthError",
    "OracleResourceError",
    "ParamError",
    "ProbabilityRangeError",
    "ProbabilitySumError",
    "QuadratureError",
    "QuadratureSpec",
    "RunConfig",
    "SeedEdgeError",
    "SeedGraph",
    "TheoryParams",
    "c_X",
    "c_X_asymptote",
    "c_in_of",
    "c_out_of",
    "check_theorem2",
    "check_theorem4",
    "compare_theory_vs_oracle",
    "default_seed",
    "degree_histogram",
    "derive_theory",
    "dp_D2",
    "dp_EX",
    "dp_E_in",
    "dp_E_out",
    "edge_joint_counts",
    "enumerate_exact",
    "f_in",
    "f_out",
    "fbar",
    "g_edge_density",
    "generate",
    "init_state",
    "kappa",
    "kappa_dc2",
    "kappa_limit",
    "load_graph",
    "make_rng",
    "mix_binomial",
    "read_histogram_csv",
    "read_joint_csv",
    "run_experiment",
    "run_trajectories",
    "save_graph",
    "step",
    "tail_exponent",
    "validate_params",
    "write_histogram_csv",
    "write_joint_csv",
    "x_count",
]
