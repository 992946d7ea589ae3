"""Synthetic run-to-fault data and the end-to-end benchmark.

The generator models one archetype: every channel is baseline + seeded
Gaussian noise, and after the fault onset the vibration noise envelope
grows linearly. Labels are mechanical: RUL at sample t is
max(0, onset - t) * sample_period_ms, and a window is failure-imminent
(+1) when its remaining life is inside the label horizon.

Note the archetype has no pre-onset signature, so "anticipation" in the
lead-time statistics measures how early the configured alert threshold
fires, not clairvoyance; the benchmark reports the precision cost of that
threshold alongside.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .decision import AlertPolicy, alert
from .errors import InvalidConfig, ShapeMismatch
from .evaluation import MetricsReport, evaluate_models, fuse_predictions
from .features import extract_features
from .rul import TrainConfig, lstm_forward, lstm_train, rul_fit_linear
from .signals import (
    Channel,
    FilterConfig,
    SensorSeries,
    channel_order,
    make_windows,
    moving_average,
)
from .svm import KernelSpec, SvmConfig, svm_decision, svm_train


@dataclass(frozen=True)
class ChannelBaseline:
    mean: float
    noise_dev: float

    def __post_init__(self):
        if not self.noise_dev > 0:
            raise InvalidConfig("noise_dev must be > 0")


def _default_baselines() -> dict[Channel, ChannelBaseline]:
    return {Channel.VIBRATION: ChannelBaseline(mean=2.0, noise_dev=0.4)}


@dataclass(frozen=True)
class DegradationConfig:
    """One synthetic run: stationary baseline, vibration ramp after onset."""

    run_length: int = 2048
    sample_period_ms: int = 1000
    fault_onset: int = 1024
    baselines: dict[Channel, ChannelBaseline] = field(default_factory=_default_baselines)
    ramp: float = 0.02          # vibration noise-envelope growth per sample
    onset_jitter: int = 0       # per-run uniform jitter on the onset, in samples
    seed: int = 0

    def __post_init__(self):
        if self.run_length < 1:
            raise InvalidConfig("run_length must be >= 1")
        if self.sample_period_ms < 1:
            raise InvalidConfig("sample_period_ms must be >= 1")
        if not 0 < self.fault_onset < self.run_length:
            raise InvalidConfig("fault_onset must satisfy 0 < onset < run_length")
        if self.ramp < 0:
            raise InvalidConfig("ramp must be >= 0")
        if self.onset_jitter < 0:
            raise InvalidConfig("onset_jitter must be >= 0")
        if (self.fault_onset - self.onset_jitter <= 0
                or self.fault_onset + self.onset_jitter >= self.run_length):
            raise InvalidConfig("onset_jitter would push the onset out of the run")
        if not self.baselines:
            raise InvalidConfig("at least one channel baseline is required")
        if self.ramp > 0 and Channel.VIBRATION not in self.baselines:
            raise InvalidConfig("a vibration baseline is required when ramp > 0")


@dataclass(frozen=True)
class RunTruth:
    """Ground truth for one run: where the fault hits and per-sample RUL."""

    run_id: str
    fault_onset_index: int
    fault_onset_ms: int
    rul_ms: np.ndarray


def generate_degradation_run(cfg: DegradationConfig, run_id: str = "run-0",
                             t0_ms: int = 0) -> tuple[list[SensorSeries], RunTruth]:
    """Deterministic synthetic run for cfg.seed.

    Channels are emitted in canonical order from one RNG stream; with
    ramp = 0 the post-onset samples are distributed exactly like the
    pre-onset ones.
    """
    rng = np.random.default_rng(cfg.seed)
    n = cfg.run_length
    onset = cfg.fault_onset
    if cfg.onset_jitter:
        onset += int(rng.integers(-cfg.onset_jitter, cfg.onset_jitter + 1))
    timestamps = t0_ms + np.arange(n, dtype=np.int64) * cfg.sample_period_ms

    series = []
    for channel in sorted(cfg.baselines, key=channel_order):
        base = cfg.baselines[channel]
        noise = rng.standard_normal(n)
        envelope = np.full(n, base.noise_dev)
        if channel is Channel.VIBRATION and cfg.ramp > 0:
            grow = np.maximum(0, np.arange(n) - onset)
            envelope = base.noise_dev + cfg.ramp * grow
        series.append(SensorSeries(
            machine_id=run_id,
            channel=channel,
            timestamps=timestamps,
            values=base.mean + envelope * noise,
        ))

    rul = np.maximum(0, onset - np.arange(n, dtype=np.int64)) * cfg.sample_period_ms
    truth = RunTruth(
        run_id=run_id,
        fault_onset_index=onset,
        fault_onset_ms=int(timestamps[onset]),
        rul_ms=rul,
    )
    return series, truth


# --- dataset assembly -----------------------------------------------------------


@dataclass(frozen=True)
class PipelineConfig:
    """How raw series become feature windows."""

    filter_k: int = 4
    apply_filter: bool = True
    window_width: int = 64
    window_stride: int = 32

    def __post_init__(self):
        FilterConfig(window_k=self.filter_k)  # validates k
        if self.window_width < 8 or self.window_width & (self.window_width - 1):
            raise InvalidConfig("window_width must be a power of two >= 8")
        if self.window_stride < 1:
            raise InvalidConfig("window_stride must be >= 1")


@dataclass
class RunWindows:
    """Labeled feature windows of one run, ordered by end timestamp."""

    run_id: str
    seed: int
    fault_onset_ms: int
    ends_ms: np.ndarray    # (m,)
    features: np.ndarray   # (m, 4) vibration quadruples
    labels: np.ndarray     # (m,) -1/+1
    rul_ms: np.ndarray     # (m,) float

    def __post_init__(self):
        m = self.ends_ms.shape[0]
        if self.features.shape != (m, 4) or self.labels.shape != (m,) or self.rul_ms.shape != (m,):
            raise ShapeMismatch("inconsistent per-run window arrays")


def windows_from_series(series: SensorSeries, pipeline: PipelineConfig):
    """Filter (optionally), window, and feature-extract one series.

    Returns (end timestamps, feature matrix) aligned by window.
    """
    if pipeline.apply_filter:
        series = moving_average(series, FilterConfig(window_k=pipeline.filter_k))
    windows = make_windows(series, pipeline.window_width, pipeline.window_stride)
    ends = np.asarray(
        [series.timestamps[w.start_index + pipeline.window_width - 1] for w in windows],
        dtype=np.int64,
    )
    feats = np.vstack([extract_features(w).values for w in windows])
    return ends, feats


def label_windows(ends_ms: np.ndarray, fault_onset_ms: int, label_horizon: int,
                  sample_period_ms: int) -> tuple[np.ndarray, np.ndarray]:
    """RUL targets and -1/+1 labels for window end times.

    +1 means the window's remaining life is strictly inside the horizon
    (post-onset windows have RUL 0 and are +1 for any horizon >= 1).
    """
    rul = np.maximum(0, fault_onset_ms - ends_ms).astype(np.float64)
    labels = np.where(rul < label_horizon * sample_period_ms, 1, -1).astype(np.int64)
    return rul, labels


def generate_dataset(n_runs: int, template: DegradationConfig, label_horizon: int,
                     seed: int, pipeline: PipelineConfig | None = None) -> list[RunWindows]:
    """n_runs labeled runs with per-run seeds seed, seed+1, ..."""
    if n_runs < 1:
        raise InvalidConfig("n_runs must be >= 1")
    if label_horizon < 0:
        raise InvalidConfig("label_horizon must be >= 0")
    pipeline = pipeline or PipelineConfig()
    out = []
    for i in range(n_runs):
        run_seed = seed + i
        cfg = replace(template, seed=run_seed)
        run_id = f"run-{run_seed}"
        series, truth = generate_degradation_run(cfg, run_id=run_id)
        vibration = next(s for s in series if s.channel is Channel.VIBRATION)
        ends, feats = windows_from_series(vibration, pipeline)
        rul, labels = label_windows(ends, truth.fault_onset_ms, label_horizon,
                                    cfg.sample_period_ms)
        out.append(RunWindows(run_id=run_id, seed=run_seed,
                              fault_onset_ms=truth.fault_onset_ms,
                              ends_ms=ends, features=feats, labels=labels, rul_ms=rul))
    return out


def assemble_examples(runs: list[RunWindows], seq_len: int):
    """Flatten runs into model-ready rows with fixed-length feature histories.

    Only windows with at least seq_len predecessors (inclusive) are kept, so
    every model sees exactly the same rows. Returns
    (features, histories, labels, rul_ms, row run ids, row end times).
    """
    if seq_len < 1:
        raise InvalidConfig("seq_len must be >= 1")
    feats, hists, labels, ruls, run_ids, ends = [], [], [], [], [], []
    for run in runs:
        for j in range(seq_len - 1, run.ends_ms.shape[0]):
            feats.append(run.features[j])
            hists.append(run.features[j - seq_len + 1 : j + 1])
            labels.append(run.labels[j])
            ruls.append(run.rul_ms[j])
            run_ids.append(run.run_id)
            ends.append(run.ends_ms[j])
    if not feats:
        raise ShapeMismatch(f"no window has a history of {seq_len}; runs are too short")
    return (np.vstack(feats), hists, np.asarray(labels, dtype=np.int64),
            np.asarray(ruls, dtype=np.float64), run_ids,
            np.asarray(ends, dtype=np.int64))


# --- benchmark -------------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkConfig:
    master_seed: int = 42
    train_runs: int = 20
    test_runs: int = 10
    template: DegradationConfig = field(default_factory=lambda: DegradationConfig(onset_jitter=96))
    label_horizon: int = 128
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    seq_len: int = 8
    svm: SvmConfig = field(default_factory=SvmConfig)
    kernel: KernelSpec = field(default_factory=lambda: KernelSpec(kind="rbf", gamma=0.5))
    lstm_hidden: int = 8
    lstm_train: TrainConfig = field(default_factory=lambda: TrainConfig(
        learning_rate=0.05, epochs=50, grad_clip=5.0))
    tau_ms: float = 600_000.0
    sustain: int = 2
    fusion: str = "or"

    def __post_init__(self):
        if self.train_runs < 1 or self.test_runs < 1:
            raise InvalidConfig("train_runs and test_runs must be >= 1")
        if self.sustain < 1:
            raise InvalidConfig("sustain must be >= 1")
        if self.lstm_hidden < 1:
            raise InvalidConfig("lstm_hidden must be >= 1")


@dataclass
class LeadTimeStats:
    """First sustained hybrid alert vs. ground-truth fault, per test run."""

    per_run: list[dict]
    median_lead_ms: float | None
    min_lead_ms: float | None
    median_lead_samples: float | None
    min_lead_samples: float | None
    detected_runs: int
    total_runs: int


@dataclass
class BenchmarkReport:
    config: dict
    master_seed: int
    train_run_seeds: list[int]
    test_run_seeds: list[int]
    dataset: dict
    metrics: MetricsReport
    lead: LeadTimeStats
    loss_curve: list[float]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "master_seed": self.master_seed,
            "config": self.config,
            "train_run_seeds": self.train_run_seeds,
            "test_run_seeds": self.test_run_seeds,
            "dataset": self.dataset,
            "metrics": self.metrics.to_json_dict(),
            "lead_time": {
                "median_lead_ms": self.lead.median_lead_ms,
                "min_lead_ms": self.lead.min_lead_ms,
                "median_lead_samples": self.lead.median_lead_samples,
                "min_lead_samples": self.lead.min_lead_samples,
                "detected_runs": self.lead.detected_runs,
                "total_runs": self.lead.total_runs,
                "per_run": self.lead.per_run,
            },
            "loss_curve": self.loss_curve,
        }


def _config_dict(cfg: BenchmarkConfig) -> dict:
    return {
        "train_runs": cfg.train_runs,
        "test_runs": cfg.test_runs,
        "label_horizon": cfg.label_horizon,
        "seq_len": cfg.seq_len,
        "tau_ms": cfg.tau_ms,
        "sustain": cfg.sustain,
        "fusion": cfg.fusion,
        "template": {
            "run_length": cfg.template.run_length,
            "sample_period_ms": cfg.template.sample_period_ms,
            "fault_onset": cfg.template.fault_onset,
            "ramp": cfg.template.ramp,
            "onset_jitter": cfg.template.onset_jitter,
            "baselines": {ch.value: {"mean": b.mean, "noise_dev": b.noise_dev}
                          for ch, b in sorted(cfg.template.baselines.items(),
                                              key=lambda kv: kv[0].value)},
        },
        "pipeline": {
            "filter_k": cfg.pipeline.filter_k,
            "apply_filter": cfg.pipeline.apply_filter,
            "window_width": cfg.pipeline.window_width,
            "window_stride": cfg.pipeline.window_stride,
        },
        "svm": {"kernel": cfg.kernel.kind, "gamma": cfg.kernel.gamma, "c": cfg.svm.c,
                "tolerance": cfg.svm.tolerance, "standardize": cfg.svm.standardize},
        "lstm": {"hidden_dim": cfg.lstm_hidden, "learning_rate": cfg.lstm_train.learning_rate,
                 "epochs": cfg.lstm_train.epochs, "grad_clip": cfg.lstm_train.grad_clip},
    }


def lead_time_for_run(run: RunWindows, alerts: np.ndarray, sustain: int,
                      sample_period_ms: int) -> dict:
    """Lead of the first streak of `sustain` consecutive alerts, clamped at 0."""
    first_ms = None
    streak = 0
    for j, flag in enumerate(alerts):
        streak = streak + 1 if flag else 0
        if streak >= sustain:
            first_ms = int(run.ends_ms[j - sustain + 1])
            break
    detected = first_ms is not None
    lead_ms = max(0, run.fault_onset_ms - first_ms) if detected else None
    return {
        "run_id": run.run_id,
        "fault_onset_ms": run.fault_onset_ms,
        "first_alert_ms": first_ms,
        "detected": detected,
        "lead_ms": lead_ms,
        "lead_samples": (lead_ms // sample_period_ms) if detected else None,
    }


def run_benchmark(cfg: BenchmarkConfig | None = None) -> BenchmarkReport:
    """Generate disjoint train/test runs, train all models, evaluate, report."""
    cfg = cfg or BenchmarkConfig()
    train_seed = cfg.master_seed
    test_seed = cfg.master_seed + cfg.train_runs
    train_runs = generate_dataset(cfg.train_runs, cfg.template, cfg.label_horizon,
                                  train_seed, cfg.pipeline)
    test_runs = generate_dataset(cfg.test_runs, cfg.template, cfg.label_horizon,
                                 test_seed, cfg.pipeline)
    train_seeds = [r.seed for r in train_runs]
    test_seeds = [r.seed for r in test_runs]
    overlap = set(train_seeds) & set(test_seeds)
    if overlap:
        raise InvalidConfig(f"train/test run seeds overlap: {sorted(overlap)}")

    x_train, h_train, y_train, rul_train, _, _ = assemble_examples(train_runs, cfg.seq_len)
    x_test, h_test, y_test, _, _, _ = assemble_examples(test_runs, cfg.seq_len)

    svm_model = svm_train(x_train, y_train, cfg.svm, cfg.kernel)
    lstm_model, loss_curve = lstm_train(
        list(zip(h_train, rul_train)), cfg.lstm_train, input_dim=4,
        hidden_dim=cfg.lstm_hidden)
    rul_model = rul_fit_linear(x_train, rul_train)

    metrics = evaluate_models(x_test, h_test, y_test, svm_model, lstm_model,
                              rul_model, cfg.tau_ms, fusion=cfg.fusion)

    period = cfg.template.sample_period_ms
    per_run = []
    for run in test_runs:
        m = run.ends_ms.shape[0]
        flags = np.zeros(m, dtype=bool)
        for j in range(cfg.seq_len - 1, m):
            label = svm_decision(svm_model, run.features[j])
            hist = run.features[j - cfg.seq_len + 1 : j + 1]
            rul_hat, _ = lstm_forward(lstm_model, hist)
            flags[j] = fuse_predictions(label, rul_hat, cfg.tau_ms, mode=cfg.fusion) == 1
        per_run.append(lead_time_for_run(run, flags, cfg.sustain, period))

    leads = [r["lead_ms"] for r in per_run if r["detected"]]
    lead = LeadTimeStats(
        per_run=per_run,
        median_lead_ms=float(np.median(leads)) if leads else None,
        min_lead_ms=float(min(leads)) if leads else None,
        median_lead_samples=float(np.median([l // period for l in leads])) if leads else None,
        min_lead_samples=float(min(l // period for l in leads)) if leads else None,
        detected_runs=len(leads),
        total_runs=len(per_run),
    )

    dataset = {
        "train_windows": int(sum(r.ends_ms.shape[0] for r in train_runs)),
        "test_windows": int(sum(r.ends_ms.shape[0] for r in test_runs)),
        "train_rows": int(x_train.shape[0]),
        "test_rows": int(x_test.shape[0]),
        "train_positive_rows": int(np.sum(y_train == 1)),
        "test_positive_rows": int(np.sum(y_test == 1)),
    }
    return BenchmarkReport(
        config=_config_dict(cfg),
        master_seed=cfg.master_seed,
        train_run_seeds=train_seeds,
        test_run_seeds=test_seeds,
        dataset=dataset,
        metrics=metrics,
        lead=lead,
        loss_curve=loss_curve,
    )


# --- delimited report outputs -----------------------------------------------------


def metrics_csv(metrics: MetricsReport) -> str:
    """`model,precision,recall,f1` with absent metrics left empty."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "precision", "recall", "f1"])
    for name in ("svm", "lstm", "rul_linear", "hybrid"):
        if name not in metrics.entries:
            continue
        _, scores = metrics.entries[name]
        writer.writerow([
            name,
            "" if scores.precision is None else repr(scores.precision),
            "" if scores.recall is None else repr(scores.recall),
            "" if scores.f1 is None else repr(scores.f1),
        ])
    return buf.getvalue()


def lead_times_csv(lead: LeadTimeStats) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["run_id", "fault_onset_ms", "first_alert_ms", "detected",
                     "lead_ms", "lead_samples"])
    for row in lead.per_run:
        writer.writerow([
            row["run_id"], row["fault_onset_ms"],
            "" if row["first_alert_ms"] is None else row["first_alert_ms"],
            int(row["detected"]),
            "" if row["lead_ms"] is None else row["lead_ms"],
            "" if row["lead_samples"] is None else row["lead_samples"],
        ])
    return buf.getvalue()


def loss_curve_csv(loss_curve: list[float]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["epoch", "loss"])
    for epoch, loss in enumerate(loss_curve):
        writer.writerow([epoch, repr(float(loss))])
    return buf.getvalue()
