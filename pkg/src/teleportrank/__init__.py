"""Ranking and clustering of directed networks with configurable teleportation.

Stationary visit rates of teleporting random walks under four schemes
(recorded/unrecorded steps, node/link teleport targets), map-equation
clustering whose flow model honors the recording convention, and
benchmark/robustness harnesses for comparing the schemes.
"""

from ._kernels import backend as kernel_backend
from .benchmark import (BenchmarkParams, SweepResult, phase_diagram,
                        planted_partition_graph, robustness_sweep)
from .graph import Graph, GraphFormatError, load_edge_list, load_pajek, write_edge_list
from .mapeq import Codelength, FlowModel, build_flow, codelength, optimize_partition
from .metrics import (Partition, PartitionComparison, RankComparison,
                      compare_partitions, compare_rankings, cosine_similarity,
                      partition_nmi, rank_order_nmi)
from .oracle import (DenseSystem, WalkResult, build_dense_system, dense_stationary,
                     simulate_walker, taylor_stationary)
from .teleport import (ConvergenceError, RankVector, TeleportConfig,
                       preference_vector, stationary, stationary_recorded,
                       stationary_unrecorded)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkParams", "Codelength", "ConvergenceError", "DenseSystem", "FlowModel",
    "Graph", "GraphFormatError", "Partition", "PartitionComparison", "RankComparison",
    "RankVector", "SweepResult", "TeleportConfig", "WalkResult", "build_dense_system",
    "build_flow", "codelength", "compare_partitions", "compare_rankings",
    "cosine_similarity", "dense_stationary", "kernel_backend", "load_edge_list",
    "load_pajek", "optimize_partition", "partition_nmi", "phase_diagram",
    "planted_partition_graph", "preference_vector", "rank_order_nmi",
    "robustness_sweep", "simulate_walker", "stationary", "stationary_recorded",
    "stationary_unrecorded", "taylor_stationary", "write_edge_list",
]
