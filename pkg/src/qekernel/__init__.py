"""Graph kernels from simulated quantum evolution.

A graph becomes a Hamiltonian, a pulse sequence drives it, one observable is
measured, and the outcome distribution is the graph's feature. Graphs are
compared by the Jensen-Shannon divergence of those features, exponentiated
into a kernel suitable for SVM/KRR training, with classical random-walk and
graphlet kernels as baselines and Bayesian optimization for pulse and
kernel-combination parameters.
"""

from .graphs import (
    Dataset,
    Graph,
    degree_histogram,
    erdos_renyi,
    occupation_counts,
    occupation_graph,
    parse_tu_dataset,
    preprocess,
)
from .simulator import (
    HamiltonianKind,
    HamiltonianSpec,
    HardwareConfig,
    PulseSequence,
    StateVector,
    apply_global_pulse,
    evolve_diagonal,
    evolve_sparse,
    hardware_interaction_graph,
    initial_state,
    run_hardware_sequence,
    run_sequence,
)
from .measurement import (
    BinningSpec,
    NoiseModel,
    Observable,
    ProbabilityDistribution,
    default_binning,
    exact_distribution,
    expectation,
    fourier_distribution,
    histogram_from_samples,
    sample_bitstrings,
    sampled_distribution,
)
from .analytic import (
    RamseyConfig,
    feature_basis_vectors,
    fourier_features,
    occupation_trace,
    occupation_trace_generic,
    steady_state_features,
)
from .kernels import (
    KernelMatrix,
    combine_kernels,
    js_divergence,
    kernel_matrix,
    qe_kernel,
    relative_kernel_deviation,
    shannon_entropy,
)
from .classical import (
    GraphletFeatures,
    graphlet_features,
    graphlet_gram,
    graphlet_kernel,
    random_walk_gram,
    random_walk_kernel,
)
from .ml import (
    CVReport,
    KRRModel,
    SVMModel,
    cross_validate,
    krr_predict,
    krr_train,
    one_vs_one,
    svm_predict,
    svm_train,
)
from .config import (
    ConfigError,
    RunConfig,
    apply_overrides,
    load_config,
)
from .bayesopt import (
    BOConfig,
    BOResult,
    GPModel,
    SurrogateKernel,
    bayes_optimize,
    gp_fit,
    gp_posterior,
    lcb,
    matern_kernel,
    optimize_multikernel,
    rbf_kernel,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "Graph",
    "degree_histogram",
    "erdos_renyi",
    "occupation_counts",
    "occupation_graph",
    "parse_tu_dataset",
    "preprocess",
    "HamiltonianKind",
    "HamiltonianSpec",
    "HardwareConfig",
    "PulseSequence",
    "StateVector",
    "apply_global_pulse",
    "evolve_diagonal",
    "evolve_sparse",
    "hardware_interaction_graph",
    "initial_state",
    "run_hardware_sequence",
    "run_sequence",
    "BinningSpec",
    "NoiseModel",
    "Observable",
    "ProbabilityDistribution",
    "default_binning",
    "exact_distribution",
    "expectation",
    "fourier_distribution",
    "histogram_from_samples",
    "sample_bitstrings",
    "sampled_distribution",
    "RamseyConfig",
    "feature_basis_vectors",
    "fourier_features",
    "occupation_trace",
    "occupation_trace_generic",
    "steady_state_features",
    "KernelMatrix",
    "combine_kernels",
    "js_divergence",
    "kernel_matrix",
    "qe_kernel",
    "relative_kernel_deviation",
    "shannon_entropy",
    "GraphletFeatures",
    "graphlet_features",
    "graphlet_gram",
    "graphlet_kernel",
    "random_walk_gram",
    "random_walk_kernel",
    "CVReport",
    "KRRModel",
    "SVMModel",
    "cross_validate",
    "krr_predict",
    "krr_train",
    "one_vs_one",
    "svm_predict",
    "svm_train",
    "ConfigError",
    "RunConfig",
    "apply_overrides",
    "load_config",
    "BOConfig",
    "BOResult",
    "GPModel",
    "SurrogateKernel",
    "bayes_optimize",
    "gp_fit",
    "gp_posterior",
    "lcb",
    "matern_kernel",
    "optimize_multikernel",
    "rbf_kernel",
    "__version__",
]
