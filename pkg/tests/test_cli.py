"""End-to-end CLI behavior: artifacts, determinism, and exit codes."""

import io
import json
import sys

import pytest

from pdmkit.cli import main
from pdmkit.config import SEED_ENV_VAR
from pdmkit.serialize import load_model
from pdmkit.svm import SvmModel

SMALL_CONFIG = {
    "seed": 7,
    "simulate": {"runs": 3, "label_horizon": 64, "run_length": 512,
                 "fault_onset": 256, "onset_jitter": 16},
    "windows": {"width": 32, "stride": 16},
    "lstm": {"hidden_dim": 4, "seq_len": 4, "epochs": 10, "learning_rate": 0.05},
    "benchmark": {"train_runs": 3, "test_runs": 2},
}

COSTS_CSV = (
    "period,preventive_usd,corrective_usd,failure_recovery_usd\n"
    "before,2000,3500,4300\n"
    "after,2800,1200,1200\n"
)


@pytest.fixture(scope="session")
def pipeline_dir(tmp_path_factory):
    """One simulated dataset with all three models trained on it."""
    root = tmp_path_factory.mktemp("pipeline")
    cfg = root / "cfg.json"
    cfg.write_text(json.dumps(SMALL_CONFIG), encoding="utf-8")
    c = str(cfg)
    assert main(["simulate", "--config", c, "--out", str(root / "data")]) == 0
    assert main(["features", "--config", c,
                 "--data", str(root / "data" / "sensors.csv"),
                 "--ground-truth", str(root / "data" / "ground_truth.jsonl"),
                 "--out", str(root / "data" / "features.csv")]) == 0
    feats = str(root / "data" / "features.csv")
    assert main(["train-svm", "--config", c, "--features", feats,
                 "--out", str(root / "svm.json")]) == 0
    assert main(["train-lstm", "--config", c, "--features", feats,
                 "--out", str(root / "lstm.json"),
                 "--loss-curve", str(root / "loss.csv")]) == 0
    assert main(["train-rul", "--config", c, "--features", feats,
                 "--out", str(root / "rul.json")]) == 0
    return root


def _cfg(pipeline_dir):
    return str(pipeline_dir / "cfg.json")


# --- artifact shape ---------------------------------------------------------------


def test_simulate_outputs(pipeline_dir):
    sensors = (pipeline_dir / "data" / "sensors.csv").read_text(encoding="utf-8")
    lines = sensors.splitlines()
    assert lines[0] == "timestamp_ms,machine_id,channel,value"
    assert len(lines) == 1 + 3 * 512
    truth_lines = (pipeline_dir / "data" / "ground_truth.jsonl").read_text(
        encoding="utf-8").splitlines()
    assert len(truth_lines) == 3
    doc = json.loads(truth_lines[0])
    assert set(doc) == {"run_id", "fault_onset_ms"}
    assert doc["run_id"] == "run-7"


def test_features_csv_shape(pipeline_dir):
    lines = (pipeline_dir / "data" / "features.csv").read_text(
        encoding="utf-8").splitlines()
    assert lines[0] == ("machine_id,channel,window_end_ms,sigma,rms,"
                        "entropy_bits,kurtosis,rul_ms,label")
    # 512 raw - 3 filter = 509 smoothed; (509 - 32) // 16 + 1 = 30 windows per run.
    assert len(lines) == 1 + 3 * 30
    first = lines[1].split(",")
    assert first[0] == "run-7" and first[1] == "vibration"
    assert first[8] in ("-1", "1")


def test_features_without_ground_truth(pipeline_dir, tmp_path):
    out = tmp_path / "unlabeled.csv"
    assert main(["features", "--config", _cfg(pipeline_dir),
                 "--data", str(pipeline_dir / "data" / "sensors.csv"),
                 "--out", str(out)]) == 0
    row = out.read_text(encoding="utf-8").splitlines()[1].split(",")
    assert row[7] == "" and row[8] == ""


def test_trained_models_load(pipeline_dir):
    svm = load_model(pipeline_dir / "svm.json")
    assert isinstance(svm, SvmModel)
    assert svm.support_vectors.shape[0] > 0
    lstm = load_model(pipeline_dir / "lstm.json")
    assert lstm.hidden_dim == 4 and lstm.target_scale > 1.0
    loss_lines = (pipeline_dir / "loss.csv").read_text(encoding="utf-8").splitlines()
    assert loss_lines[0] == "epoch,loss" and len(loss_lines) == 11


def test_evaluate_writes_reports(pipeline_dir, tmp_path):
    out = tmp_path / "report"
    assert main(["evaluate", "--config", _cfg(pipeline_dir),
                 "--out", str(out), "--no-figures"]) == 0
    report = json.loads((out / "benchmark_report.json").read_text(encoding="utf-8"))
    assert report["master_seed"] == 7
    assert report["lead_time"]["total_runs"] == 2
    assert (out / "metrics.csv").exists()
    assert (out / "lead_times.csv").exists()
    assert (out / "loss_curve.csv").exists()
    assert not (out / "metrics.png").exists()


def test_evaluate_renders_figures(pipeline_dir, tmp_path):
    out = tmp_path / "report"
    assert main(["evaluate", "--config", _cfg(pipeline_dir), "--out", str(out)]) == 0
    for name in ("metrics.png", "loss_curve.png", "lead_times.png", "run_overview.png"):
        data = (out / name).read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n" and len(data) > 1000


def test_cost_report(tmp_path):
    costs = tmp_path / "costs.csv"
    costs.write_text(COSTS_CSV, encoding="utf-8")
    out = tmp_path / "costrep"
    assert main(["cost", "--costs", str(costs), "--out", str(out),
                 "--no-figures"]) == 0
    report = json.loads((out / "cost_report.json").read_text(encoding="utf-8"))
    assert report["delta_cents"] == 460_000
    assert report["before"]["total_usd"] == "9800.00"
    assert not (out / "cost_report.png").exists()


def test_cost_requires_two_rows(tmp_path):
    costs = tmp_path / "costs.csv"
    costs.write_text(COSTS_CSV + "later,1,1,1\n", encoding="utf-8")
    assert main(["cost", "--costs", str(costs), "--out", str(tmp_path / "o")]) == 2


# --- monitor -----------------------------------------------------------------------


def test_monitor_streams_windows(pipeline_dir, tmp_path, capsys):
    assert main(["monitor", "--config", _cfg(pipeline_dir),
                 "--model", str(pipeline_dir / "lstm.json"),
                 "--data", str(pipeline_dir / "data" / "sensors.csv")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "timestamp_ms,machine_id,rul_hat_ms,alert"
    assert len(lines) == 1 + 3 * 30  # one line per completed window
    for line in lines[1:]:
        ts, machine, rul_hat, flag = line.split(",")
        assert machine.startswith("run-")
        assert float(rul_hat) >= 0.0
        assert flag in ("0", "1")


def test_monitor_rul_linear_and_file_output(pipeline_dir, tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    for out in (out_a, out_b):
        assert main(["monitor", "--config", _cfg(pipeline_dir),
                     "--model", str(pipeline_dir / "rul.json"),
                     "--data", str(pipeline_dir / "data" / "sensors.csv"),
                     "--out", str(out)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    assert len(out_a.read_text(encoding="utf-8").splitlines()) == 1 + 3 * 30


def test_monitor_reads_stdin(pipeline_dir, monkeypatch, capsys):
    text = (pipeline_dir / "data" / "sensors.csv").read_text(encoding="utf-8")
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    assert main(["monitor", "--config", _cfg(pipeline_dir),
                 "--model", str(pipeline_dir / "lstm.json"), "--data", "-"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 1 + 3 * 30


def test_monitor_rejects_svm_model(pipeline_dir, capsys):
    assert main(["monitor", "--config", _cfg(pipeline_dir),
                 "--model", str(pipeline_dir / "svm.json"),
                 "--data", str(pipeline_dir / "data" / "sensors.csv")]) == 2
    assert "MalformedRow" in capsys.readouterr().err


def test_monitor_rejects_stale_timestamps(pipeline_dir, monkeypatch, capsys):
    text = ("timestamp_ms,machine_id,channel,value\n"
            "1000,m,vibration,1.0\n"
            "1000,m,vibration,2.0\n")
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    assert main(["monitor", "--config", _cfg(pipeline_dir),
                 "--model", str(pipeline_dir / "lstm.json"), "--data", "-"]) == 2
    assert "DuplicateTimestamp" in capsys.readouterr().err


# --- determinism -------------------------------------------------------------------


def test_pipeline_reruns_byte_identical(pipeline_dir, tmp_path):
    c = _cfg(pipeline_dir)
    for sub in ("one", "two"):
        root = tmp_path / sub
        assert main(["simulate", "--config", c, "--out", str(root / "data")]) == 0
        assert main(["features", "--config", c,
                     "--data", str(root / "data" / "sensors.csv"),
                     "--ground-truth", str(root / "data" / "ground_truth.jsonl"),
                     "--out", str(root / "features.csv")]) == 0
        assert main(["train-svm", "--config", c, "--features", str(root / "features.csv"),
                     "--out", str(root / "svm.json")]) == 0
        assert main(["train-lstm", "--config", c, "--features", str(root / "features.csv"),
                     "--out", str(root / "lstm.json")]) == 0
        assert main(["train-rul", "--config", c, "--features", str(root / "features.csv"),
                     "--out", str(root / "rul.json")]) == 0
        assert main(["evaluate", "--config", c, "--out", str(root / "report"),
                     "--no-figures"]) == 0
    for rel in ("data/sensors.csv", "data/ground_truth.jsonl", "features.csv",
                "svm.json", "lstm.json", "rul.json", "report/benchmark_report.json",
                "report/metrics.csv", "report/lead_times.csv", "report/loss_curve.csv"):
        a = (tmp_path / "one" / rel).read_bytes()
        b = (tmp_path / "two" / rel).read_bytes()
        assert a == b, f"{rel} differs between identical reruns"


def test_seed_env_var_overrides_config(pipeline_dir, tmp_path, monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "123")
    out = tmp_path / "report"
    assert main(["evaluate", "--config", _cfg(pipeline_dir),
                 "--out", str(out), "--no-figures"]) == 0
    report = json.loads((out / "benchmark_report.json").read_text(encoding="utf-8"))
    assert report["master_seed"] == 123
    assert report["train_run_seeds"][0] == 123


# --- exit codes --------------------------------------------------------------------


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["simulate"]) == 1  # missing --out
    assert "usage error" in capsys.readouterr().err


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "simulate" in capsys.readouterr().out


def test_missing_data_file_exits_2(pipeline_dir, tmp_path, capsys):
    missing = str(tmp_path / "nope.csv")
    assert main(["features", "--config", _cfg(pipeline_dir),
                 "--data", missing, "--out", str(tmp_path / "f.csv")]) == 2
    assert "pdmkit" in capsys.readouterr().err


def test_bad_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}), encoding="utf-8")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "d")]) == 2
    assert "InvalidConfig" in capsys.readouterr().err


def test_unlabeled_features_exit_2(pipeline_dir, tmp_path, capsys):
    unlabeled = tmp_path / "unlabeled.csv"
    assert main(["features", "--config", _cfg(pipeline_dir),
                 "--data", str(pipeline_dir / "data" / "sensors.csv"),
                 "--out", str(unlabeled)]) == 0
    assert main(["train-svm", "--config", _cfg(pipeline_dir),
                 "--features", str(unlabeled), "--out", str(tmp_path / "m.json")]) == 2
    assert main(["train-rul", "--config", _cfg(pipeline_dir),
                 "--features", str(unlabeled), "--out", str(tmp_path / "m.json")]) == 2


def test_no_convergence_exits_3(pipeline_dir, tmp_path, capsys):
    doc = dict(SMALL_CONFIG)
    doc["svm"] = {"max_passes": 1}
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(doc), encoding="utf-8")
    assert main(["train-svm", "--config", str(cfg),
                 "--features", str(pipeline_dir / "data" / "features.csv"),
                 "--out", str(tmp_path / "m.json")]) == 3
    assert "NoConvergence" in capsys.readouterr().err


def test_mixed_channels_rejected_for_training(pipeline_dir, tmp_path, capsys):
    sensors = tmp_path / "sensors.csv"
    rows = ["timestamp_ms,machine_id,channel,value"]
    rng_vals = [0.1, -0.4, 0.9, 0.3, -0.2, 0.8, -0.6, 0.05]
    for t in range(40):
        rows.append(f"{t * 1000},m,vibration,{2.0 + rng_vals[t % 8]}")
        rows.append(f"{t * 1000},m,temperature,{70.0 + rng_vals[(t + 3) % 8]}")
    sensors.write_text("\n".join(rows) + "\n", encoding="utf-8")
    truth = tmp_path / "truth.jsonl"
    truth.write_text('{"run_id": "m", "fault_onset_ms": 30000}\n', encoding="utf-8")
    feats = tmp_path / "features.csv"
    assert main(["features", "--config", _cfg(pipeline_dir), "--data", str(sensors),
                 "--ground-truth", str(truth), "--out", str(feats)]) == 0
    assert main(["train-rul", "--config", _cfg(pipeline_dir),
                 "--features", str(feats), "--out", str(tmp_path / "m.json")]) == 2
    assert "mixes channels" in capsys.readouterr().err
