"""Canonical weight distributions and the analytical transfer-time model.

For a bandwidth-bound reference workload reading ``S`` shared bytes spread
across the nodes, execution time is the longest parallel transfer:

    T = max_i  S * w_i / minbw(i)

where ``minbw(i)`` is the weakest-path bandwidth from node ``i`` to the
worker set.  T is minimized by making every per-node transfer take equally
long, i.e. by weights proportional to ``minbw``.  Those are the canonical
weights; everything here is scale-invariant in the bandwidth matrix.

Shared sizes are plain bytes, bandwidths GB/s (decimal, 1e9 bytes/s), so
execution times come out in seconds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .topology import Topology, min_bandwidth_vector, validate_workers

GB = 1e9

_SUM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class WeightDistribution:
    """Per-node fractions of the shared pages; non-negative, summing to 1."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValidationError(f"weights must be a non-empty vector, got shape {w.shape}")
        if np.any(w < -1e-12) or np.any(w > 1 + 1e-12):
            raise ValidationError("every weight must lie in [0, 1]")
        total = float(w.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise ValidationError(f"weights must sum to 1 within {_SUM_TOL}, got {total}")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightDistribution):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)


def single_worker_weights(topo: Topology, worker: int) -> WeightDistribution:
    """Weights proportional to each node's bandwidth toward a single worker."""
    return multi_worker_weights(topo, [worker])


def multi_worker_weights(topo: Topology, workers) -> WeightDistribution:
    """Weights proportional to each node's weakest-path bandwidth to the workers."""
    minbw = min_bandwidth_vector(topo, workers)
    return WeightDistribution(minbw / minbw.sum())


def execution_time(topo: Topology, workers, dist: WeightDistribution, shared_bytes: int) -> float:
    """Modeled time (seconds) for the workers to pull ``shared_bytes`` under ``dist``."""
    if shared_bytes <= 0:
        raise ValidationError(f"shared_bytes must be positive, got {shared_bytes}")
    if len(dist) != topo.node_count:
        raise ValidationError(f"distribution has {len(dist)} entries for a {topo.node_count}-node machine")
    minbw = min_bandwidth_vector(topo, workers)
    return float(np.max((shared_bytes / GB) * dist.weights / minbw))


@dataclass(frozen=True, eq=False)
class CanonicalTable:
    """Canonical distributions for a collection of worker sets."""

    entries: dict  # frozenset[int] -> WeightDistribution

    def __eq__(self, other) -> bool:
        if not isinstance(other, CanonicalTable):
            return NotImplemented
        return self.entries == other.entries


def build_canonical_table(topo: Topology, worker_sets) -> CanonicalTable:
    """Compute canonical weights for every requested worker set (deduplicated)."""
    requested = [validate_workers(ws, topo.node_count) for ws in worker_sets]
    if not requested:
        raise ValidationError("at least one worker set is required")
    entries = {}
    for ws in requested:
        if ws not in entries:
            entries[ws] = multi_worker_weights(topo, ws)
    return CanonicalTable(entries=entries)


def render_canonical_table(table: CanonicalTable) -> str:
    """Serialize a table keyed by sorted worker-set notation, e.g. "0,1"."""
    doc = {
        ",".join(str(i) for i in sorted(ws)): dist.weights.tolist()
        for ws, dist in sorted(table.entries.items(), key=lambda kv: sorted(kv[0]))
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_canonical_table(text: str) -> CanonicalTable:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed canonical table document: {exc}") from exc
    if not isinstance(doc, dict) or not doc:
        raise ValidationError("canonical table document must be a non-empty JSON object")
    entries = {}
    for key, weights in doc.items():
        try:
            ws = frozenset(int(part) for part in key.split(","))
        except ValueError as exc:
            raise ValidationError(f"bad worker-set key {key!r}") from exc
        entries[ws] = WeightDistribution(np.array(weights, dtype=float))
    return CanonicalTable(entries=entries)
