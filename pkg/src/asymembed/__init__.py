"""Sampling, classification, decomposition, and certified coarse-embedding
kernels for sparse regular graphs."""

from .classifier import (
    ClassParams,
    ConditionResult,
    MembershipReport,
    Overrides,
    check_expansion,
    check_membership,
    check_subset_density,
    derive_params,
)
from .decomposition import (
    Chart,
    CheckResult,
    Decomposition,
    DecompositionReport,
    build_chart,
    decompose,
    measured_lebesgue,
    verify_decomposition,
)
from .embedding_glue import (
    KernelCertificate,
    PartitionOfUnity,
    PipelineCheck,
    TreeEmbedding,
    assemble_asymptotic_kernel,
    embed_tree_l1,
    glue_kernels,
    kernel_from_embedding,
    measured_envelopes,
    merge_decay_profiles,
    partition_of_unity,
)
from .graph_core import (
    BoundaryRatio,
    CycleSet,
    DomainError,
    Graph,
    GraphFormatError,
    MetricTable,
    count_cycles,
    densest_subgraph,
    edge_boundary_ratio,
    enumerate_short_cycles,
    girth,
    parse_graph,
    serialize_graph,
    shortest_path_metric,
    spectral_gap,
)
from .kernel_algebra import (
    DecayFunction,
    DistortionPair,
    Kernel,
    PiecewiseLinear,
    PositiveKernel,
    RecoveredKernel,
    SmoothedKernel,
    SpectralVerdict,
    decay_to_distortion,
    distortion_to_decay,
    identity_envelope,
    identity_pair,
    is_cnd,
    is_pt,
    schoenberg_transform,
)
from .experiments import (
    BatchReport,
    ExperimentConfig,
    MCReport,
    PipelineResult,
    classify_batch,
    export_report,
    graph_id,
    pipeline_run,
    run_montecarlo,
    summarize_certificate,
)
from .random_regular import (
    SamplerConfig,
    SamplingBudgetError,
    acceptance_rate_estimate,
    expected_cycle_count,
    sample_batch,
    sample_regular,
)

__all__ = [
    "BatchReport",
    "BoundaryRatio",
    "Chart",
    "CheckResult",
    "ClassParams",
    "ConditionResult",
    "CycleSet",
    "DecayFunction",
    "Decomposition",
    "DecompositionReport",
    "DistortionPair",
    "DomainError",
    "ExperimentConfig",
    "Graph",
    "GraphFormatError",
    "Kernel",
    "KernelCertificate",
    "MCReport",
    "MembershipReport",
    "MetricTable",
    "Overrides",
    "PartitionOfUnity",
    "PiecewiseLinear",
    "PipelineCheck",
    "PipelineResult",
    "PositiveKernel",
    "RecoveredKernel",
    "SamplerConfig",
    "SamplingBudgetError",
    "SmoothedKernel",
    "SpectralVerdict",
    "TreeEmbedding",
    "acceptance_rate_estimate",
    "assemble_asymptotic_kernel",
    "build_chart",
    "check_expansion",
    "check_membership",
    "check_subset_density",
    "classify_batch",
    "count_cycles",
    "decay_to_distortion",
    "decompose",
    "densest_subgraph",
    "derive_params",
    "distortion_to_decay",
    "edge_boundary_ratio",
    "embed_tree_l1",
    "enumerate_short_cycles",
    "expected_cycle_count",
    "export_report",
    "girth",
    "glue_kernels",
    "graph_id",
    "identity_envelope",
    "identity_pair",
    "is_cnd",
    "is_pt",
    "kernel_from_embedding",
    "measured_envelopes",
    "measured_lebesgue",
    "merge_decay_profiles",
    "parse_graph",
    "partition_of_unity",
    "pipeline_run",
    "run_montecarlo",
    "sample_batch",
    "sample_regular",
    "schoenberg_transform",
    "serialize_graph",
    "shortest_path_metric",
    "spectral_gap",
    "summarize_certificate",
    "verify_decomposition",
]

__version__ = "0.1.0"
