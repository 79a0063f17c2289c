import json

import numpy as np
import pytest

from lqgcost.cli import main
from lqgcost import CostSpec, LqgPlant, LtiSystem, save_plant_model, save_system_model
from conftest import scalar_cost, scalar_system


@pytest.fixture
def scalar_model(tmp_path):
    path = tmp_path / "scalar.json"
    save_system_model(path, scalar_system(), scalar_cost())
    return str(path)


@pytest.fixture
def non_sylvester_model(tmp_path):
    sys = LtiSystem(A=[[0.0, 1.0], [0.0, 0.0]], V=np.eye(2),
                    mu0=np.zeros(2), Sigma0=np.eye(2))
    cost = CostSpec(Q=np.eye(2), alpha=0.0, horizon=1.0)
    path = tmp_path / "integrator.json"
    save_system_model(path, sys, cost)
    return str(path)


@pytest.fixture
def benchmark_model(tmp_path):
    plant = LqgPlant(A=[[1.0, 0.0], [0.05, 1.0]], B=[[1.0], [0.0]], C=np.eye(2),
                     Q=np.eye(2), R=np.eye(1), V=np.eye(2), W=0.01 * np.eye(2),
                     alpha=-0.8)
    path = tmp_path / "plant.json"
    save_plant_model(path, plant, np.zeros(2), np.zeros((2, 2)))
    return str(path)


class TestAnalyze:
    def test_scalar_reference_values(self, scalar_model, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["analyze", scalar_model, "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["mean"] == pytest.approx(1.0, rel=1e-10)
        assert report["variance"] == pytest.approx(2.0 / 3.0, rel=1e-10)
        assert report["method"] == "lyapunov"
        stdout = capsys.readouterr().out
        assert "mean" in stdout and "variance" in stdout

    def test_lyapunov_method_on_singular_drift_exits_2(self, non_sylvester_model, capsys):
        assert main(["analyze", non_sylvester_model, "--method", "lyapunov"]) == 2
        assert "sylvester" in capsys.readouterr().err.lower()

    def test_auto_falls_back_to_expm(self, non_sylvester_model, tmp_path):
        out = tmp_path / "report.json"
        assert main(["analyze", non_sylvester_model, "--method", "auto",
                     "--out", str(out)]) == 0
        assert json.loads(out.read_text())["method"] == "expm"

    def test_horizon_override(self, scalar_model, tmp_path):
        out = tmp_path / "report.json"
        assert main(["analyze", scalar_model, "--horizon", "3",
                     "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["horizon"] == 3

    def test_expm_method_finite_horizon(self, scalar_model, tmp_path):
        out = tmp_path / "report.json"
        assert main(["analyze", scalar_model, "--method", "expm",
                     "--horizon", "4", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["method"] == "expm"
        assert report["mean"] == pytest.approx(1.0 - np.exp(-4.0) * 1.0, rel=1e-6)

    def test_expm_method_infinite_horizon_exits_1(self, scalar_model):
        assert main(["analyze", scalar_model, "--method", "expm"]) == 1

    def test_missing_file_exits_1(self):
        assert main(["analyze", "/nonexistent/model.json"]) == 1

    def test_plant_kind_rejected(self, benchmark_model):
        assert main(["analyze", benchmark_model]) == 1

    def test_conditions_in_report(self, scalar_model, tmp_path):
        out = tmp_path / "report.json"
        main(["analyze", scalar_model, "--out", str(out)])
        report = json.loads(out.read_text())
        names = {c["name"] for c in report["conditions"]}
        assert "alpha < 0" in names and "A+1a stable" in names
        assert all(c["passed"] for c in report["conditions"])


class TestSimulate:
    def test_zero_paths_exits_1(self, scalar_model):
        assert main(["simulate", scalar_model, "--paths", "0", "--T", "2"]) == 1

    def test_infinite_horizon_requires_T(self, scalar_model, capsys):
        assert main(["simulate", scalar_model, "--paths", "100"]) == 1
        assert "--T is required" in capsys.readouterr().err

    def test_byte_identical_reports(self, scalar_model, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        args = ["simulate", scalar_model, "--paths", "20000", "--dt", "0.01",
                "--T", "4", "--seed", "5"]
        assert main(args + ["--out", str(out1)]) == 0
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_thread_count_invariance(self, scalar_model, tmp_path, monkeypatch):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        args = ["simulate", scalar_model, "--paths", "20000", "--dt", "0.01",
                "--T", "4", "--seed", "5"]
        monkeypatch.setenv("LQGCOST_THREADS", "1")
        assert main(args + ["--out", str(out1)]) == 0
        monkeypatch.setenv("LQGCOST_THREADS", "4")
        assert main(args + ["--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_agreement_flagged_pass(self, scalar_model, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["simulate", scalar_model, "--paths", "100000", "--dt", "0.02",
                     "--T", "4", "--seed", "1", "--scheme", "exact",
                     "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["agreement"]["within_4_stderr"] is True
        assert "PASS" in capsys.readouterr().out


class TestSynthesize:
    def test_benchmark_gain_and_roundtrip(self, benchmark_model, tmp_path, capsys):
        out = tmp_path / "report.json"
        closed = tmp_path / "closed.json"
        assert main(["synthesize", benchmark_model, "--full-state",
                     "--out-model", str(closed), "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        f = np.array(report["F"])
        assert abs(f[0, 0] - 1.6) <= 0.05 and abs(f[0, 1] - 9.9) <= 0.05
        assert report["K"] is None
        # the written closed-loop model must re-ingest cleanly
        assert main(["analyze", str(closed)]) == 0

    def test_observer_synthesis(self, benchmark_model, tmp_path):
        out = tmp_path / "report.json"
        closed = tmp_path / "closed.json"
        assert main(["synthesize", benchmark_model, "--out-model", str(closed),
                     "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert np.array(report["K"]).shape == (2, 2)
        assert main(["analyze", str(closed)]) == 0

    def test_wrong_kind_exits_1(self, scalar_model):
        assert main(["synthesize", scalar_model]) == 1


class TestTune:
    def test_variance_objective(self, benchmark_model, tmp_path):
        out = tmp_path / "report.json"
        assert main(["tune", benchmark_model, "--objective", "variance",
                     "--max-iter", "60", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        values = [v for _, v in report["trace"]]
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_mean_objective_stays_at_riccati_gain(self, benchmark_model, tmp_path):
        out = tmp_path / "report.json"
        assert main(["tune", benchmark_model, "--objective", "mean",
                     "--max-iter", "50", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        f0 = np.array(report["F0"])
        f = np.array(report["F"])
        assert np.abs(f - f0).max() < 0.05

    def test_infeasible_init_exits_2(self, benchmark_model):
        assert main(["tune", benchmark_model, "--init", "0,0",
                     "--max-iter", "5"]) == 2

    def test_malformed_init_exits_1(self, benchmark_model):
        assert main(["tune", benchmark_model, "--init", "1,2,3"]) == 1


class TestReproduceExample:
    def test_smoke_with_tiny_path_count(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert main(["reproduce-example", "--paths", "2000", "--T", "10",
                     "--seed", "1", "--tune-iters", "80", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["assumption"]["V"] == [[1.0, 0.0], [0.0, 1.0]]
        assert report["assumption"]["mu0"] == [0.0, 0.0]
        assert report["assumption"]["Sigma0"] == [[0.0, 0.0], [0.0, 0.0]]
        gain = np.ravel(report["mean_optimal"]["gain"])
        assert abs(gain[0] - 1.6) <= 0.05 and abs(gain[1] - 9.9) <= 0.05
        stdout = capsys.readouterr().out
        assert "assumption" in stdout

    def test_assumption_file_override(self, tmp_path):
        assumption = tmp_path / "assume.json"
        assumption.write_text(json.dumps({"V": [[2.0, 0.0], [0.0, 2.0]]}))
        out = tmp_path / "report.json"
        assert main(["reproduce-example", "--paths", "1000", "--T", "8",
                     "--tune-iters", "40", "--assumption-file", str(assumption),
                     "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["assumption"]["V"] == [[2.0, 0.0], [0.0, 2.0]]

    def test_bad_assumption_file_exits_1(self, tmp_path):
        assumption = tmp_path / "assume.json"
        assumption.write_text(json.dumps({"X": 1}))
        assert main(["reproduce-example", "--paths", "100",
                     "--assumption-file", str(assumption)]) == 1
