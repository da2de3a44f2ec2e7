"""Simulator for CONGEST and SUPPORTED CONGEST with a two-party reduction harness."""

from .engine import (
    ACTIVE,
    PASSIVE,
    PLAIN,
    AdviceMap,
    Algorithm,
    ExecutionMode,
    NodeContext,
    RunMetrics,
    RunResult,
    default_bandwidth,
    preprocess,
    run,
)
from .graph import (
    Graph,
    PartitionedInstance,
    SupportedInstance,
    merge_to_graph,
    parse_graph,
    serialize_graph,
    validate_subgraph,
)

__version__ = "0.1.0"
