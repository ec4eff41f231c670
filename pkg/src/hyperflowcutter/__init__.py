"""Balanced hypergraph bipartitioning with incremental maximum flows."""

from .baseline import baseline_partition
from .core import CutterState, FrontEntry, ParetoFront, run_core
from .disconnected import ComponentPareto, SplitOption, combine, gap_filler, zero_cut_subsetsum
from .executor import (
    EnsemblePool,
    ExecutorConfig,
    NoSolutionError,
    PartitionResult,
    interleave,
    partition,
    run_waves,
)
from .hypergraph import (
    Bipartition,
    FormatError,
    Hypergraph,
    connected_components,
    cut_size,
    load_hmetis,
    max_block_size,
    read_partition,
    write_hmetis,
    write_partition,
)
from .maxflow import FlowState, Side, augment_max_flow, extract_cut
from .refine import RefineConfig, RefinementError, extract_terminals, rebahfc

__version__ = "0.1.0"

__all__ = [
    "baseline_partition",
    "CutterState",
    "FrontEntry",
    "ParetoFront",
    "run_core",
    "ComponentPareto",
    "SplitOption",
    "combine",
    "gap_filler",
    "zero_cut_subsetsum",
    "EnsemblePool",
    "ExecutorConfig",
    "NoSolutionError",
    "PartitionResult",
    "interleave",
    "partition",
    "run_waves",
    "Bipartition",
    "FormatError",
    "Hypergraph",
    "connected_components",
    "cut_size",
    "load_hmetis",
    "max_block_size",
    "read_partition",
    "write_hmetis",
    "write_partition",
    "FlowState",
    "Side",
    "augment_max_flow",
    "extract_cut",
    "RefineConfig",
    "RefinementError",
    "extract_terminals",
    "rebahfc",
]
