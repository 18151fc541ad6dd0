"""Why uniform interleaving loses on asymmetric machines.

On a NUMA box the bandwidth from a memory node to a worker's node varies
with the path taken: local accesses are fast, hops across the interconnect
are not.  If pages are spread uniformly, the slowest path sets the pace and
the fast nodes idle.  The canonical distribution instead gives each node a
share proportional to the *weakest* bandwidth any worker sees from it, which
makes every node finish its transfers at the same moment.

Run with: python3 demos/01_canonical_weights.py
"""

import numpy as np

from bwplace import (
    Topology,
    WeightDistribution,
    execution_time,
    multi_worker_weights,
    single_worker_weights,
)

# Two-node machine: local paths run at 10 GB/s, the cross link at 4 GB/s.
topo = Topology(np.array([[10.0, 4.0], [4.0, 10.0]]), cores_per_node=8)
shared = 14_000_000_000  # 14 GB of shared data

print("bandwidth matrix (GB/s, rows = memory node, cols = destination):")
print(topo.bandwidth, end="\n\n")

canonical = single_worker_weights(topo, worker=0)
uniform = WeightDistribution(np.array([0.5, 0.5]))
local_only = WeightDistribution(np.array([1.0, 0.0]))

print("all threads run on node 0; candidate page distributions:")
for name, dist in [("canonical", canonical), ("uniform", uniform), ("local only", local_only)]:
    t = execution_time(topo, {0}, dist, shared)
    weights = " ".join(f"{w:.4f}" for w in dist.weights)
    print(f"  {name:<10}  weights [{weights}]  modeled time {t:.3f} s")

print()
print("the canonical split (10/14, 4/14) equalizes the per-node transfer")
print("times, so neither memory node is the straggler:")
times = canonical.weights * shared / 1e9 / np.array([10.0, 4.0])
print("  per-node transfer times:", np.round(times, 6), "s")

# The same idea with several worker nodes: each node's share follows the
# weakest bandwidth any worker observes from it.
bw = np.array([[6.0, 9.0, 5.0], [3.0, 5.0, 5.0], [1.0, 2.0, 5.0]])
topo3 = Topology(bw, cores_per_node=8)
dist = multi_worker_weights(topo3, {0, 1})
print()
print("three nodes, workers on {0, 1}: weakest-path bandwidths are (6, 3, 1)")
print("  canonical weights:", np.round(dist.weights, 4))
