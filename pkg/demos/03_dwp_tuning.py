"""Online search for the data-to-worker proximity factor.

The canonical distribution is optimal for purely bandwidth-bound code, but
latency-sensitive phases prefer their pages *closer* to the workers.  The
proximity factor interpolates between the canonical split (0.0) and packing
everything onto the worker nodes (1.0).  Instead of modeling the workload,
the tuner watches its live stall-rate stream: 20-sample windows, trim the 5
highest and lowest, and keep stepping the factor up by 0.10 while the
trimmed average keeps dropping.

Run with: python3 demos/03_dwp_tuning.py
"""

import numpy as np

from bwplace import Topology, TunerConfig, WorkloadSpec, run_tuning, stall_oracle
from bwplace.tuner import render_history

rng = np.random.default_rng(8)
n = 4
bw = np.exp(rng.uniform(np.log(5), np.log(40), (n, n)))
np.fill_diagonal(bw, rng.uniform(30, 50, n))
# Workers sit on node 0; remote nodes answer slowly (latency in s/GB here).
latency = np.array([0.05, 0.6, 0.8, 0.4])
topo = Topology(bw, cores_per_node=8, latency=latency)
workers = {0}

workload = WorkloadSpec(
    shared_bytes=8_000_000_000,
    threads=8,
    bw_intensity=0.4,
    latency_sensitivity=0.6,
    noise_std=0.02,
    seed=21,
)


class DwpBox:
    """The tuner's plan applier and the oracle's sampling point."""

    def __init__(self):
        self.value = 0.0

    def get(self):
        return self.value

    def set(self, value):
        self.value = value


box = DwpBox()
stream = stall_oracle(topo, workers, workload, box.get)
result = run_tuning(stream, box.set, TunerConfig())

print("tuning a latency-leaning workload (60% latency-sensitive):")
print(render_history(result.records))
print(f"settled proximity factor: {result.final_dwp:.2f}")
print()
print("here the latency term dominates throughout, so every window improves")
print("and the climb rides to the 1.0 cap.  had a window failed to improve,")
print("the tuner would have stopped there and reverted one step -- either")
print("way it finishes within one 0.10 step of the best grid value, in at")
print("most 11 windows.")
