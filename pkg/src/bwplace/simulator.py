"""Deterministic model of transfer time, profiling, and stall-rate streams.

The stall proxy blends the bandwidth-bound transfer time with a linear
latency term:

    exec_time = bw_intensity * T_transfer + latency_sensitivity * L
    L         = sum_i w_i * latency_i

so purely bandwidth-bound workloads reduce to the transfer-time model (whose
optimum is the canonical distribution) while latency-heavy ones pull the
optimum toward the workers.  When the topology carries no latency vector, a
default of 1 / bw(i -> nearest worker) is used.

All randomness comes from numpy's ``default_rng`` (PCG64) seeded explicitly;
identical inputs and seeds give bit-identical results.  Test fixtures rely
on that generator choice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .canonical import GB, WeightDistribution, multi_worker_weights
from .errors import ValidationError
from .planner import Dwp, apply_dwp
from .topology import Topology, min_bandwidth_vector, validate_workers

_WORKLOAD_KEYS = {"shared_bytes", "threads", "bw_intensity", "latency_sensitivity", "noise_std", "seed"}


@dataclass(frozen=True)
class WorkloadSpec:
    """Shared-data volume, parallelism, and sensitivity profile of a workload."""

    shared_bytes: int
    threads: int
    bw_intensity: float
    latency_sensitivity: float
    noise_std: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.shared_bytes <= 0:
            raise ValidationError(f"shared_bytes must be positive, got {self.shared_bytes}")
        if self.threads <= 0:
            raise ValidationError(f"threads must be positive, got {self.threads}")
        if abs(self.bw_intensity + self.latency_sensitivity - 1.0) > 1e-12:
            raise ValidationError("bw_intensity and latency_sensitivity must sum to 1")
        if not 0.0 <= self.bw_intensity <= 1.0:
            raise ValidationError(f"bw_intensity must lie in [0, 1], got {self.bw_intensity}")
        if self.noise_std < 0:
            raise ValidationError(f"noise_std must be non-negative, got {self.noise_std}")


@dataclass(frozen=True)
class SimResult:
    exec_time: float
    stall_rate: float


def effective_latency(topo: Topology, workers) -> np.ndarray:
    """Per-node access-cost vector; defaults to 1/bw(i -> nearest worker)."""
    if topo.latency is not None:
        return topo.latency
    ws = sorted(validate_workers(workers, topo.node_count))
    return 1.0 / topo.bandwidth[:, ws].max(axis=1)


def simulate_execution(
    topo: Topology,
    workers,
    dist: WeightDistribution,
    workload: WorkloadSpec,
    rng: np.random.Generator | None = None,
) -> SimResult:
    """Model one run; pass ``rng`` to draw noise from an ongoing stream."""
    if len(dist) != topo.node_count:
        raise ValidationError(f"distribution has {len(dist)} entries for a {topo.node_count}-node machine")
    minbw = min_bandwidth_vector(topo, workers)
    t_transfer = float(np.max((workload.shared_bytes / GB) * dist.weights / minbw))
    latency = float(dist.weights @ effective_latency(topo, workers))
    exec_time = workload.bw_intensity * t_transfer + workload.latency_sensitivity * latency
    if workload.noise_std > 0:
        if rng is None:
            rng = np.random.default_rng(workload.seed)
        factor = 1.0 + rng.normal(0.0, workload.noise_std)
    else:
        factor = 1.0
    return SimResult(exec_time=exec_time, stall_rate=max(exec_time * factor, 0.0))


def profile_bandwidth(topo: Topology, workers, noise_std: float, seed: int) -> np.ndarray:
    """Estimated bandwidth matrix from a simulated uniform-interleave profiling run.

    Only paths terminating at a worker node are observable; those entries get
    multiplicative Gaussian noise, the rest are copied through unchanged.
    """
    if noise_std < 0:
        raise ValidationError(f"noise_std must be non-negative, got {noise_std}")
    ws = sorted(validate_workers(workers, topo.node_count))
    est = np.array(topo.bandwidth)
    if noise_std > 0:
        rng = np.random.default_rng(seed)
        factors = 1.0 + rng.normal(0.0, noise_std, size=(topo.node_count, len(ws)))
        est[:, ws] = np.maximum(est[:, ws] * factors, 1e-9)
    return est


def stall_oracle(
    topo: Topology,
    workers,
    workload: WorkloadSpec,
    dwp_provider: Callable[[], float],
) -> Iterator[float]:
    """Unbounded single-consumer stream of stall-rate samples.

    Each pull re-reads the current proximity factor, scales the canonical
    distribution accordingly, and draws one noisy measurement.
    """
    ws = validate_workers(workers, topo.node_count)
    canonical = multi_worker_weights(topo, ws)
    rng = np.random.default_rng(workload.seed)
    while True:
        dist = apply_dwp(canonical, ws, Dwp(float(dwp_provider())))
        yield simulate_execution(topo, ws, dist, workload, rng=rng).stall_rate


def co_scheduled_stall_oracle(
    topo: Topology,
    workers_b,
    workload_a: WorkloadSpec,
    dwp_provider: Callable[[], float],
    pressure: float = 2.0,
    spare_capacity: float = 0.25,
) -> Iterator[float]:
    """Stall stream of a high-priority workload squeezed by a co-scheduled one.

    The high-priority workload runs on the complement of ``workers_b`` and
    suffers in proportion to the co-scheduled workload's page mass on those
    nodes beyond a spare-capacity allowance; once the overflow is gone its
    stall rate flattens.
    """
    ws_b = validate_workers(workers_b, topo.node_count)
    if len(ws_b) == topo.node_count:
        raise ValidationError("co-scheduled tuning needs at least one non-worker node")
    canonical = multi_worker_weights(topo, ws_b)
    nonworkers = [i for i in range(topo.node_count) if i not in ws_b]
    rng = np.random.default_rng(workload_a.seed)
    base = workload_a.shared_bytes / GB
    while True:
        dist = apply_dwp(canonical, ws_b, Dwp(float(dwp_provider())))
        overflow = max(float(dist.weights[nonworkers].sum()) - spare_capacity, 0.0)
        stall = base * (1.0 + pressure * overflow)
        if workload_a.noise_std > 0:
            stall *= 1.0 + rng.normal(0.0, workload_a.noise_std)
        yield max(stall, 0.0)


def parse_workload(text: str) -> WorkloadSpec:
    """Parse a workload document (JSON with the WorkloadSpec fields)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed workload document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("workload document must be a JSON object")
    unknown = set(doc) - _WORKLOAD_KEYS
    if unknown:
        raise ValidationError(f"unknown workload fields: {sorted(unknown)}")
    for key in ("shared_bytes", "threads", "bw_intensity", "latency_sensitivity"):
        if key not in doc:
            raise ValidationError(f"missing required workload field {key!r}")
    return WorkloadSpec(
        shared_bytes=doc["shared_bytes"],
        threads=doc["threads"],
        bw_intensity=float(doc["bw_intensity"]),
        latency_sensitivity=float(doc["latency_sensitivity"]),
        noise_std=float(doc.get("noise_std", 0.0)),
        seed=int(doc.get("seed", 0)),
    )


def render_workload(workload: WorkloadSpec) -> str:
    doc = {
        "shared_bytes": workload.shared_bytes,
        "threads": workload.threads,
        "bw_intensity": workload.bw_intensity,
        "latency_sensitivity": workload.latency_sensitivity,
        "noise_std": workload.noise_std,
        "seed": workload.seed,
    }
    return json.dumps(doc, indent=2) + "\n"
