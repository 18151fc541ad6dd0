"""Operator command line: weights, plan, simulate, tune, profile.

Exit codes: 0 success, 2 bad input (parse or validation failure), 3 the
request is infeasible (e.g. segment too small for the distribution).
All machine-readable output (``--format structured``) is deterministic
given the input files and ``--seed``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import canonical as canon
from . import planner, simulator, topology, tuner
from .errors import InfeasiblePlanError, ValidationError

DEFAULT_SEGMENT_BYTES = 4 * 1024 * 1024


class _DwpBox:
    """Mutable holder wiring the tuner's steps into the oracle's sampling."""

    def __init__(self, value: float = 0.0):
        self.value = value

    def get(self) -> float:
        return self.value

    def set(self, value: float) -> None:
        self.value = value


def _parse_workers(spec: str) -> list[int]:
    try:
        return [int(part) for part in spec.split(",") if part != ""]
    except ValueError as exc:
        raise ValidationError(f"bad worker list {spec!r}; expected comma-separated node indices") from exc


def _load_topology(path: str) -> topology.Topology:
    return topology.parse_topology(Path(path).read_text(encoding="utf-8"))


def _load_workload(args) -> simulator.WorkloadSpec:
    workload = simulator.parse_workload(Path(args.workload).read_text(encoding="utf-8"))
    if args.seed is not None:
        workload = dataclasses.replace(workload, seed=args.seed)
    return workload


def _distribution(topo, workers, dwp):
    dist = canon.multi_worker_weights(topo, workers)
    if dwp is not None:
        dist = planner.apply_dwp(dist, workers, planner.Dwp(dwp))
    return dist


def _emit(text: str) -> None:
    sys.stdout.write(text)


def cmd_weights(args) -> int:
    topo = _load_topology(args.topology)
    workers = topology.validate_workers(_parse_workers(args.workers), topo.node_count)
    minbw = topology.min_bandwidth_vector(topo, workers)
    dist = _distribution(topo, workers, args.dwp)
    if args.format == "structured":
        doc = {
            "workers": sorted(workers),
            "dwp": 0.0 if args.dwp is None else args.dwp,
            "minbw_gbps": minbw.tolist(),
            "weights": dist.weights.tolist(),
        }
        _emit(json.dumps(doc, indent=2) + "\n")
    else:
        _emit(f"workers: {','.join(str(w) for w in sorted(workers))}"
              + (f"  dwp: {args.dwp}" if args.dwp is not None else "") + "\n")
        _emit(f"{'node':>4}  {'minbw_gbps':>10}  {'weight':>8}\n")
        for i in range(topo.node_count):
            _emit(f"{i:>4}  {minbw[i]:>10.3f}  {dist.weights[i]:>8.4f}\n")
    return 0


def cmd_plan(args) -> int:
    topo = _load_topology(args.topology)
    workers = topology.validate_workers(_parse_workers(args.workers), topo.node_count)
    dist = _distribution(topo, workers, args.dwp)
    segment = planner.Segment(0, args.segment_bytes)
    plan = planner.build_plan(segment, dist, args.page_size)
    if args.format == "structured":
        _emit(planner.render_plan(plan))
        if args.verify:
            counts = planner.plan_page_counts(plan, topo.node_count)
            sys.stderr.write("page_counts: " + json.dumps(counts.tolist()) + "\n")
    else:
        _emit(f"page_size: {plan.page_size}\n")
        _emit(f"{'start':>12}  {'length':>12}  nodes\n")
        for d in plan.directives:
            _emit(f"{d.start:>12}  {d.length:>12}  {','.join(str(n) for n in sorted(d.nodes))}\n")
        if args.verify:
            counts = planner.plan_page_counts(plan, topo.node_count)
            _emit("page_counts: " + " ".join(str(c) for c in counts) + "\n")
    return 0


def cmd_simulate(args) -> int:
    topo = _load_topology(args.topology)
    workers = topology.validate_workers(_parse_workers(args.workers), topo.node_count)
    workload = _load_workload(args)
    dist = _distribution(topo, workers, args.dwp)
    result = simulator.simulate_execution(topo, workers, dist, workload)
    if args.format == "structured":
        doc = {
            "workers": sorted(workers),
            "dwp": 0.0 if args.dwp is None else args.dwp,
            "weights": dist.weights.tolist(),
            "exec_time": result.exec_time,
            "stall_rate": result.stall_rate,
        }
        _emit(json.dumps(doc, indent=2) + "\n")
    else:
        _emit("weights: " + " ".join(f"{w:.4f}" for w in dist.weights) + "\n")
        _emit(f"exec_time: {result.exec_time:.6g} s\n")
        _emit(f"stall_rate: {result.stall_rate:.6g}\n")
    return 0


def cmd_profile(args) -> int:
    topo = _load_topology(args.topology)
    workers = topology.validate_workers(_parse_workers(args.workers), topo.node_count)
    est = simulator.profile_bandwidth(topo, workers, args.noise_std, args.seed or 0)
    profiled = topology.Topology(bandwidth=est, cores_per_node=topo.cores_per_node, latency=topo.latency)
    if args.format == "structured":
        _emit(topology.render_topology(profiled))
    else:
        _emit("estimated bandwidth_gbps (rows = source node):\n")
        for row in est:
            _emit("  " + " ".join(f"{v:8.3f}" for v in row) + "\n")
    return 0


def _final_plan(topo, workers, dwp, args):
    dist = _distribution(topo, workers, dwp)
    segment = planner.Segment(0, args.segment_bytes)
    return planner.build_plan(segment, dist, args.page_size)


def cmd_tune(args) -> int:
    topo = _load_topology(args.topology)
    workers = topology.validate_workers(_parse_workers(args.workers), topo.node_count)
    workload = _load_workload(args)
    config = tuner.TunerConfig()
    box = _DwpBox(0.0)
    stream_b = simulator.stall_oracle(topo, workers, workload, box.get)
    if args.mode == "standalone":
        result = tuner.run_tuning(stream_b, box.set, config)
        records = result.records
        bound = None
    else:
        if args.hp_workload is None:
            raise ValidationError("coscheduled mode requires --hp-workload")
        workload_a = simulator.parse_workload(Path(args.hp_workload).read_text(encoding="utf-8"))
        stream_a = simulator.co_scheduled_stall_oracle(
            topo, workers, workload_a, box.get,
            pressure=args.pressure, spare_capacity=args.spare_capacity,
        )
        result = tuner.co_scheduled_tuning(stream_a, stream_b, box.set, config)
        records = result.stage1_records + result.stage2_records
        bound = result.bound
    plan = _final_plan(topo, workers, result.final_dwp, args)
    if args.format == "structured":
        doc = {
            "mode": args.mode,
            "final_dwp": result.final_dwp,
            "history": [
                {"window": r.index, "dwp": r.dwp, "trimmed_avg": r.window_avg, "decision": r.decision.value}
                for r in records
            ],
            "plan": json.loads(planner.render_plan(plan)),
        }
        if bound is not None:
            doc["stage1_bound"] = bound
        _emit(json.dumps(doc, indent=2) + "\n")
    else:
        if args.mode == "coscheduled":
            _emit("stage 1 (guided by high-priority workload):\n")
            _emit(tuner.render_history(result.stage1_records))
            _emit(f"stage1_bound: {bound:.2f}\n")
            _emit("stage 2 (guided by tuned workload):\n")
            _emit(tuner.render_history(result.stage2_records))
        else:
            _emit(tuner.render_history(records))
        _emit(f"final_dwp: {result.final_dwp:.2f}\n")
        _emit("final plan:\n")
        for d in plan.directives:
            _emit(f"{d.start:>12}  {d.length:>12}  {','.join(str(n) for n in sorted(d.nodes))}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bwplace", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, workload=False):
        p.add_argument("--topology", required=True, help="topology document path")
        p.add_argument("--workers", required=True, help="comma-separated worker node indices")
        p.add_argument("--format", choices=("human", "structured"), default="human")
        p.add_argument("--seed", type=int, default=None)
        if workload:
            p.add_argument("--workload", required=True, help="workload document path")

    p = sub.add_parser("weights", help="canonical (or proximity-scaled) weights and minbw vector")
    common(p)
    p.add_argument("--dwp", type=float, default=None)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("plan", help="compile weights into an interleaving plan")
    common(p)
    p.add_argument("--dwp", type=float, default=None)
    p.add_argument("--segment-bytes", type=int, default=DEFAULT_SEGMENT_BYTES)
    p.add_argument("--page-size", type=int, default=planner.DEFAULT_PAGE_SIZE)
    p.add_argument("--verify", action="store_true", help="also report per-node page counts")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", help="model one run of a workload under a distribution")
    common(p, workload=True)
    p.add_argument("--dwp", type=float, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("tune", help="run the online proximity-factor search against the simulator")
    common(p, workload=True)
    p.add_argument("--mode", choices=("standalone", "coscheduled"), default="standalone")
    p.add_argument("--hp-workload", default=None, help="high-priority workload document (coscheduled mode)")
    p.add_argument("--pressure", type=float, default=2.0)
    p.add_argument("--spare-capacity", type=float, default=0.25)
    p.add_argument("--segment-bytes", type=int, default=DEFAULT_SEGMENT_BYTES)
    p.add_argument("--page-size", type=int, default=planner.DEFAULT_PAGE_SIZE)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("profile", help="simulated bandwidth profiling of a topology")
    common(p)
    p.add_argument("--noise-std", type=float, default=0.0)
    p.set_defaults(func=cmd_profile)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasiblePlanError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except (ValidationError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
