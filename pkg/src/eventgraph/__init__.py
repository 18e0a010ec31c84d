"""Streaming event detection over a correlated keyword graph.

Bursty keywords and their strong Jaccard correlations form an active graph;
clusters are maintained incrementally as edge classes under shared 3- and
4-cycles and reported as ranked events.
"""

from .clusters import Cluster, ClusterDelta, ClusterEngine, ClusterIndex
from .graph import AkgGraph, ContractViolation
from .ingest import Message, ParseError, QuantumBatch, batch_quanta, read_messages, tokenize
from .kernels import BACKEND
from .pipeline import Detector, RunMetrics
from .ranking import EventRecord, rank_cluster, report_threshold
from .window import ConfigError, EngineConfig

__version__ = "0.1.0"

__all__ = [
    "AkgGraph",
    "BACKEND",
    "Cluster",
    "ClusterDelta",
    "ClusterEngine",
    "ClusterIndex",
    "ConfigError",
    "ContractViolation",
    "Detector",
    "EngineConfig",
    "EventRecord",
    "Message",
    "ParseError",
    "QuantumBatch",
    "RunMetrics",
    "batch_quanta",
    "rank_cluster",
    "read_messages",
    "report_threshold",
    "tokenize",
]
