"""NUMA machine model: node set, asymmetric bandwidth matrix, worker sets.

The machine is abstracted as N nodes with one aggregate memory controller
each.  ``bandwidth[src, dst]`` is the read bandwidth (GB/s) that threads on
node ``dst`` observe when pulling data that lives on node ``src``.  The
matrix may be asymmetric both off-diagonal and per direction; the diagonal
holds each node's local-memory bandwidth.

Topology documents are UTF-8 JSON with the fields ``node_count``,
``cores_per_node``, ``bandwidth_gbps`` (row-major N x N, row = source node)
and an optional length-N ``latency`` vector of relative access costs.
Unknown fields are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import TopologyError

_ALLOWED_KEYS = {"node_count", "cores_per_node", "bandwidth_gbps", "latency"}


@dataclass(frozen=True, eq=False)
class Topology:
    """Immutable machine model; safe for unrestricted concurrent reads."""

    bandwidth: np.ndarray
    cores_per_node: int
    latency: Optional[np.ndarray] = None

    def __post_init__(self):
        bw = np.asarray(self.bandwidth, dtype=float)
        if bw.ndim != 2 or bw.shape[0] != bw.shape[1] or bw.shape[0] < 1:
            raise TopologyError(f"bandwidth must be a square N x N matrix, got shape {bw.shape}")
        if not np.all(np.isfinite(bw)) or np.any(bw <= 0):
            raise TopologyError("all bandwidth entries must be strictly positive and finite")
        if not isinstance(self.cores_per_node, int) or self.cores_per_node < 1:
            raise TopologyError(f"cores_per_node must be a positive integer, got {self.cores_per_node!r}")
        bw.flags.writeable = False
        object.__setattr__(self, "bandwidth", bw)
        if self.latency is not None:
            lat = np.asarray(self.latency, dtype=float)
            if lat.shape != (bw.shape[0],):
                raise TopologyError(f"latency must be a length-{bw.shape[0]} vector, got shape {lat.shape}")
            if not np.all(np.isfinite(lat)) or np.any(lat <= 0):
                raise TopologyError("latency entries must be strictly positive and finite")
            lat.flags.writeable = False
            object.__setattr__(self, "latency", lat)

    @property
    def node_count(self) -> int:
        return self.bandwidth.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Topology):
            return NotImplemented
        if self.cores_per_node != other.cores_per_node:
            return False
        if not np.array_equal(self.bandwidth, other.bandwidth):
            return False
        if (self.latency is None) != (other.latency is None):
            return False
        return self.latency is None or np.array_equal(self.latency, other.latency)


def validate_workers(workers: Iterable[int], node_count: int) -> frozenset[int]:
    """Check a worker node set against a machine of ``node_count`` nodes."""
    members = list(workers)
    ws = frozenset(members)
    if len(ws) != len(members):
        raise TopologyError(f"duplicate worker node indices in {sorted(members)}")
    if not ws:
        raise TopologyError("worker set must be non-empty")
    for w in ws:
        if not isinstance(w, (int, np.integer)) or isinstance(w, bool):
            raise TopologyError(f"worker node index must be an integer, got {w!r}")
        if not 0 <= w < node_count:
            raise TopologyError(f"worker node {w} out of range [0, {node_count})")
    return frozenset(int(w) for w in ws)


def min_bandwidth(topo: Topology, workers: Iterable[int], node: int) -> float:
    """Bandwidth of the weakest path from ``node`` to any worker node."""
    ws = validate_workers(workers, topo.node_count)
    if not 0 <= node < topo.node_count:
        raise TopologyError(f"node {node} out of range [0, {topo.node_count})")
    return float(topo.bandwidth[node, sorted(ws)].min())


def min_bandwidth_vector(topo: Topology, workers: Iterable[int]) -> np.ndarray:
    """Per-node weakest-path bandwidths to the worker set, as a length-N vector."""
    ws = validate_workers(workers, topo.node_count)
    return topo.bandwidth[:, sorted(ws)].min(axis=1)


def parse_topology(text: str) -> Topology:
    """Parse and validate a topology document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"malformed topology document: {exc}") from exc
    if not isinstance(doc, dict):
        raise TopologyError("topology document must be a JSON object")
    unknown = set(doc) - _ALLOWED_KEYS
    if unknown:
        raise TopologyError(f"unknown topology fields: {sorted(unknown)}")
    for key in ("node_count", "cores_per_node", "bandwidth_gbps"):
        if key not in doc:
            raise TopologyError(f"missing required topology field {key!r}")
    n = doc["node_count"]
    if not isinstance(n, int) or n < 1:
        raise TopologyError(f"node_count must be a positive integer, got {n!r}")
    rows = doc["bandwidth_gbps"]
    if not isinstance(rows, list) or len(rows) != n:
        raise TopologyError(f"bandwidth_gbps must have {n} rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise TopologyError(f"bandwidth_gbps row {i} must have {n} entries")
    latency = doc.get("latency")
    if latency is not None and (not isinstance(latency, list) or len(latency) != n):
        raise TopologyError(f"latency must be a length-{n} array")
    cores = doc["cores_per_node"]
    if not isinstance(cores, int):
        raise TopologyError(f"cores_per_node must be an integer, got {cores!r}")
    return Topology(
        bandwidth=np.array(rows, dtype=float),
        cores_per_node=cores,
        latency=None if latency is None else np.array(latency, dtype=float),
    )


def render_topology(topo: Topology) -> str:
    """Serialize a Topology back to its document form (round-trips exactly)."""
    doc = {
        "node_count": topo.node_count,
        "cores_per_node": topo.cores_per_node,
        "bandwidth_gbps": topo.bandwidth.tolist(),
    }
    if topo.latency is not None:
        doc["latency"] = topo.latency.tolist()
    return json.dumps(doc, indent=2) + "\n"
