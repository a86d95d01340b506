"""Latency-aware qubit routing: swap insertion that hides in circuit slack."""

from .circuit import (DepGraph, LatencyModel, Layering, SlackWindow, build_dep_graph, critical_path,
                      earliest_starts, idle_windows, latest_starts, partition_layers)
from .mapping import Mapping, SwapOp, apply_swap, identity_mapping
from .qasm import QasmError, RawGate, SourceCircuit, emit_qasm, parse_qasm
from .scheduler import TransformedCircuit, run_scheduler
from .search import MappingCandidate, SearchAborted, SearchParams, resolve_conflicts
from .topology import CouplingGraph, all_pairs_distance, is_executable, load_topology, swap_cost
from .verify import Metrics, check_compliance, check_equivalence, compute_metrics, unitary_oracle_equivalence

__version__ = "0.1.0"
