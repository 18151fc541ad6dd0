"""Bandwidth-aware NUMA page placement toolkit.

Computes weighted-interleaving distributions from an asymmetric bandwidth
matrix, scales them with an online-tuned data-to-worker proximity factor,
compiles them into executable interleaving plans, and validates everything
against a built-in memory-transfer simulator.
"""

from .canonical import (
    CanonicalTable,
    WeightDistribution,
    build_canonical_table,
    execution_time,
    multi_worker_weights,
    single_worker_weights,
)
from .errors import InfeasiblePlanError, TopologyError, ValidationError
from .planner import (
    Dwp,
    InterleavePlan,
    MigrationSet,
    Segment,
    apply_dwp,
    build_plan,
    diff_plans,
    plan_page_counts,
)
from .simulator import SimResult, WorkloadSpec, profile_bandwidth, simulate_execution, stall_oracle
from .topology import Topology, min_bandwidth, parse_topology, render_topology, validate_workers
from .tuner import TunerConfig, TunerState, co_scheduled_tuning, run_tuning, summarize_window, tuner_step

__all__ = [
    "CanonicalTable",
    "Dwp",
    "InfeasiblePlanError",
    "InterleavePlan",
    "MigrationSet",
    "Segment",
    "SimResult",
    "Topology",
    "TopologyError",
    "TunerConfig",
    "TunerState",
    "ValidationError",
    "WeightDistribution",
    "WorkloadSpec",
    "apply_dwp",
    "build_canonical_table",
    "build_plan",
    "co_scheduled_tuning",
    "diff_plans",
    "execution_time",
    "min_bandwidth",
    "multi_worker_weights",
    "parse_topology",
    "plan_page_counts",
    "profile_bandwidth",
    "render_topology",
    "run_tuning",
    "simulate_execution",
    "single_worker_weights",
    "stall_oracle",
    "summarize_window",
    "tuner_step",
    "validate_workers",
]
