import json

import pytest

from bwplace.cli import main
from bwplace.planner import parse_plan
from bwplace.topology import parse_topology

TOPO2 = {
    "node_count": 2,
    "cores_per_node": 8,
    "bandwidth_gbps": [[10.0, 4.0], [4.0, 10.0]],
}

TOPO4 = {
    "node_count": 4,
    "cores_per_node": 8,
    "bandwidth_gbps": [
        [10.0, 7.0, 7.0, 7.0],
        [6.0, 10.0, 7.0, 7.0],
        [4.0, 7.0, 10.0, 7.0],
        [2.0, 7.0, 7.0, 10.0],
    ],
}

WORKLOAD = {
    "shared_bytes": 14_000_000_000,
    "threads": 8,
    "bw_intensity": 1.0,
    "latency_sensitivity": 0.0,
    "noise_std": 0.0,
    "seed": 0,
}


@pytest.fixture
def docs(tmp_path):
    paths = {}
    for name, doc in (("topo2", TOPO2), ("topo4", TOPO4), ("workload", WORKLOAD)):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(doc))
        paths[name] = str(p)
    noisy = dict(WORKLOAD, noise_std=0.05, seed=3)
    p = tmp_path / "noisy.json"
    p.write_text(json.dumps(noisy))
    paths["noisy"] = str(p)
    hp = dict(WORKLOAD, shared_bytes=10**9)
    p = tmp_path / "hp.json"
    p.write_text(json.dumps(hp))
    paths["hp"] = str(p)
    return paths


class TestWeights:
    def test_structured(self, docs, capsys):
        assert main(["weights", "--topology", docs["topo2"], "--workers", "0",
                     "--format", "structured"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["minbw_gbps"] == [10.0, 4.0]
        assert doc["weights"] == pytest.approx([10 / 14, 4 / 14])

    def test_with_dwp(self, docs, capsys):
        assert main(["weights", "--topology", docs["topo2"], "--workers", "0",
                     "--dwp", "1.0", "--format", "structured"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["weights"] == pytest.approx([1.0, 0.0])

    def test_human_has_one_row_per_node(self, docs, capsys):
        assert main(["weights", "--topology", docs["topo4"], "--workers", "0"]) == 0
        out = capsys.readouterr().out
        assert len(out.splitlines()) == 2 + 4


class TestPlan:
    def test_worked_example(self, docs, capsys):
        assert main(["plan", "--topology", docs["topo4"], "--workers", "0",
                     "--segment-bytes", str(22 * 4096), "--format", "structured"]) == 0
        plan = parse_plan(capsys.readouterr().out)
        assert [sorted(d.nodes) for d in plan.directives] == [[0, 1, 2, 3], [0, 1, 2], [0, 1], [0]]

    def test_verify_reports_counts(self, docs, capsys):
        assert main(["plan", "--topology", docs["topo4"], "--workers", "0",
                     "--segment-bytes", str(22 * 4096), "--format", "structured",
                     "--verify"]) == 0
        captured = capsys.readouterr()
        parse_plan(captured.out)  # stdout stays round-trippable
        assert json.loads(captured.err.split("page_counts:")[1]) == [10, 6, 4, 2]

    def test_infeasible_exit_code(self, docs, capsys):
        assert main(["plan", "--topology", docs["topo4"], "--workers", "0",
                     "--segment-bytes", "4096"]) == 3
        assert "error" in capsys.readouterr().err


class TestSimulate:
    def test_structured(self, docs, capsys):
        assert main(["simulate", "--topology", docs["topo2"], "--workers", "0",
                     "--workload", docs["workload"], "--format", "structured"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["exec_time"] == pytest.approx(1.0)

    def test_seed_override_is_deterministic(self, docs, capsys):
        base = ["simulate", "--topology", docs["topo2"], "--workers", "0",
                "--workload", docs["noisy"], "--format", "structured"]
        assert main(base + ["--seed", "11"]) == 0
        first = capsys.readouterr().out
        assert main(base + ["--seed", "11"]) == 0
        assert capsys.readouterr().out == first
        assert main(base + ["--seed", "12"]) == 0
        assert capsys.readouterr().out != first


class TestTune:
    def test_standalone_structured(self, docs, capsys):
        assert main(["tune", "--topology", docs["topo2"], "--workers", "0",
                     "--workload", docs["workload"], "--format", "structured"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["mode"] == "standalone"
        assert 0.0 <= doc["final_dwp"] <= 1.0
        assert len(doc["history"]) <= 11
        assert doc["history"][-1]["decision"] == "stop"
        parse_plan(json.dumps(doc["plan"]))

    def test_coscheduled_reports_bound(self, docs, capsys):
        assert main(["tune", "--topology", docs["topo2"], "--workers", "0",
                     "--workload", docs["workload"], "--mode", "coscheduled",
                     "--hp-workload", docs["hp"], "--format", "structured"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["final_dwp"] >= doc["stage1_bound"]

    def test_coscheduled_requires_hp_workload(self, docs, capsys):
        assert main(["tune", "--topology", docs["topo2"], "--workers", "0",
                     "--workload", docs["workload"], "--mode", "coscheduled"]) == 2
        assert "hp-workload" in capsys.readouterr().err

    def test_deterministic_with_seed(self, docs, capsys):
        argv = ["tune", "--topology", docs["topo2"], "--workers", "0",
                "--workload", docs["noisy"], "--seed", "5", "--format", "structured"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        assert capsys.readouterr().out == first


class TestProfile:
    def test_output_feeds_back_into_weights(self, docs, tmp_path, capsys):
        assert main(["profile", "--topology", docs["topo2"], "--workers", "0",
                     "--noise-std", "0.05", "--seed", "9", "--format", "structured"]) == 0
        out = capsys.readouterr().out
        topo = parse_topology(out)
        assert topo.node_count == 2
        est_path = tmp_path / "est.json"
        est_path.write_text(out)
        assert main(["weights", "--topology", str(est_path), "--workers", "0"]) == 0

    def test_zero_noise_round_trips_exactly(self, docs, capsys):
        assert main(["profile", "--topology", docs["topo2"], "--workers", "0",
                     "--format", "structured"]) == 0
        assert parse_topology(capsys.readouterr().out).bandwidth.tolist() == TOPO2["bandwidth_gbps"]


class TestErrors:
    def test_missing_file(self, docs, capsys):
        assert main(["weights", "--topology", "/nonexistent.json", "--workers", "0"]) == 2

    def test_bad_worker_index(self, docs, capsys):
        assert main(["weights", "--topology", docs["topo2"], "--workers", "5"]) == 2
        assert "out of range" in capsys.readouterr().err

    def test_malformed_worker_list(self, docs, capsys):
        assert main(["weights", "--topology", docs["topo2"], "--workers", "a,b"]) == 2
