"""Compiling a weight distribution into OS-executable directives.

Kernels only offer *uniform* interleaving over a node set, so a weighted
distribution has to be expressed as contiguous sub-ranges, each uniformly
interleaved over a progressively shrinking set of nodes.  Walking the nodes
in ascending weight order and sizing the k-th sub-range as
|remaining| * (w_k - w_{k-1}) * length makes the per-node totals come out
exactly proportional to the weights.

Run with: python3 demos/02_interleave_plans.py
"""

import numpy as np

from bwplace import Segment, WeightDistribution, build_plan, diff_plans, plan_page_counts

PAGE = 4096

dist = WeightDistribution(np.array([0.1, 0.2, 0.3, 0.4]))
plan = build_plan(Segment(0, 100 * PAGE), dist, PAGE)

print("target weights:", dist.weights.tolist())
print()
print("compiled plan over a 100-page segment:")
print(f"{'pages':>6}  interleave over nodes")
for d in plan.directives:
    print(f"{d.length // PAGE:>6}  {sorted(d.nodes)}")

counts = plan_page_counts(plan, 4)
print()
print("pages landing on each node:", counts.tolist())
print("exactly 10/20/30/40 -- the weights times the 100 pages.")

# When the distribution changes (say the proximity factor moved), diff_plans
# reports the minimal set of sub-ranges whose node set changed, i.e. the
# pages a live system would migrate.
shifted = WeightDistribution(np.array([0.05, 0.15, 0.3, 0.5]))
new_plan = build_plan(Segment(0, 100 * PAGE), shifted, PAGE)
moves = diff_plans(plan, new_plan).moves
print()
print("moving to weights", shifted.weights.tolist(), "requires:")
for m in moves:
    print(f"  re-interleave {m.length // PAGE:>3} pages at offset {m.start:>7}: "
          f"{sorted(m.from_nodes)} -> {sorted(m.to_nodes)}")
unchanged = 100 - sum(m.length for m in moves) // PAGE
print(f"  ({unchanged} pages keep their current placement)")
