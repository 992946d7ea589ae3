"""Run configuration: one JSON document, strictly validated.

Unknown keys are rejected at every level so a typo cannot silently fall
back to a default. The PDM_SEED environment variable, when set, overrides
the document's master seed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .bench import BenchmarkConfig, ChannelBaseline, DegradationConfig, PipelineConfig
from .decision import AlertPolicy
from .errors import InvalidConfig
from .rul import TrainConfig
from .signals import parse_channel
from .svm import KernelSpec, SvmConfig

SEED_ENV_VAR = "PDM_SEED"


@dataclass(frozen=True)
class Paths:
    data: str = "data"
    models: str = "models"
    reports: str = "reports"


@dataclass(frozen=True)
class LstmSection:
    hidden_dim: int = 8
    seq_len: int = 8
    train: TrainConfig = field(default_factory=lambda: TrainConfig(
        learning_rate=0.05, epochs=50, grad_clip=5.0))

    def __post_init__(self):
        if self.hidden_dim < 1 or self.seq_len < 1:
            raise InvalidConfig("lstm hidden_dim and seq_len must be >= 1")


@dataclass(frozen=True)
class AlertSection:
    tau_ms: float = 600_000.0
    sustain: int = 2

    def __post_init__(self):
        AlertPolicy(tau_ms=self.tau_ms)
        if self.sustain < 1:
            raise InvalidConfig("alert sustain must be >= 1")


@dataclass(frozen=True)
class SimulateSection:
    runs: int = 20
    label_horizon: int = 128
    template: DegradationConfig = field(default_factory=lambda: DegradationConfig(
        onset_jitter=96))

    def __post_init__(self):
        if self.runs < 1:
            raise InvalidConfig("simulate runs must be >= 1")
        if self.label_horizon < 0:
            raise InvalidConfig("label_horizon must be >= 0")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    paths: Paths = field(default_factory=Paths)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    svm: SvmConfig = field(default_factory=SvmConfig)
    kernel: KernelSpec = field(default_factory=lambda: KernelSpec(kind="rbf", gamma=0.5))
    lstm: LstmSection = field(default_factory=LstmSection)
    alert: AlertSection = field(default_factory=AlertSection)
    fusion: str = "or"
    simulate: SimulateSection = field(default_factory=SimulateSection)
    train_runs: int = 20
    test_runs: int = 10

    def to_benchmark_config(self) -> BenchmarkConfig:
        return BenchmarkConfig(
            master_seed=self.seed,
            train_runs=self.train_runs,
            test_runs=self.test_runs,
            template=self.simulate.template,
            label_horizon=self.simulate.label_horizon,
            pipeline=self.pipeline,
            seq_len=self.lstm.seq_len,
            svm=replace(self.svm, seed=self.seed),
            kernel=self.kernel,
            lstm_hidden=self.lstm.hidden_dim,
            lstm_train=replace(self.lstm.train, seed=self.seed),
            tau_ms=self.alert.tau_ms,
            sustain=self.alert.sustain,
            fusion=self.fusion,
        )


# --- strict document walking -------------------------------------------------


def _require_mapping(doc, path: str) -> dict:
    if not isinstance(doc, dict):
        raise InvalidConfig(f"config section {path!r} must be an object")
    return doc

def _reject_unknown(doc: dict, allowed: set[str], path: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise InvalidConfig(f"unknown config keys under {path!r}: {', '.join(unknown)}")


def _get(doc: dict, key: str, default, kinds, path: str):
    if key not in doc:
        return default
    value = doc[key]
    if kinds is bool:
        if not isinstance(value, bool):
            raise InvalidConfig(f"{path}.{key} must be a boolean")
        return value
    if kinds is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidConfig(f"{path}.{key} must be an integer")
        return value
    if kinds is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidConfig(f"{path}.{key} must be a number")
        return float(value)
    if kinds is str:
        if not isinstance(value, str):
            raise InvalidConfig(f"{path}.{key} must be a string")
        return value
    raise AssertionError(kinds)


def _parse_filter_windows(doc: dict) -> PipelineConfig:
    filter_doc = _require_mapping(doc.get("filter", {}), "filter")
    _reject_unknown(filter_doc, {"window_k", "apply"}, "filter")
    windows_doc = _require_mapping(doc.get("windows", {}), "windows")
    _reject_unknown(windows_doc, {"width", "stride"}, "windows")
    return PipelineConfig(
        filter_k=_get(filter_doc, "window_k", 4, int, "filter"),
        apply_filter=_get(filter_doc, "apply", True, bool, "filter"),
        window_width=_get(windows_doc, "width", 64, int, "windows"),
        window_stride=_get(windows_doc, "stride", 32, int, "windows"),
    )


def _parse_svm(doc: dict) -> tuple[SvmConfig, KernelSpec]:
    svm_doc = _require_mapping(doc.get("svm", {}), "svm")
    _reject_unknown(svm_doc, {"kernel", "gamma", "c", "tolerance", "max_passes",
                              "standardize"}, "svm")
    kind = _get(svm_doc, "kernel", "rbf", str, "svm")
    gamma = _get(svm_doc, "gamma", 0.5 if kind == "rbf" else None, float, "svm")
    kernel = KernelSpec(kind=kind, gamma=gamma)
    max_passes = svm_doc.get("max_passes")
    if max_passes is not None and (isinstance(max_passes, bool) or not isinstance(max_passes, int)):
        raise InvalidConfig("svm.max_passes must be an integer or null")
    cfg = SvmConfig(
        c=_get(svm_doc, "c", 1.0, float, "svm"),
        tolerance=_get(svm_doc, "tolerance", 1e-3, float, "svm"),
        max_passes=max_passes,
        standardize=_get(svm_doc, "standardize", True, bool, "svm"),
    )
    return cfg, kernel


def _parse_lstm(doc: dict) -> LstmSection:
    lstm_doc = _require_mapping(doc.get("lstm", {}), "lstm")
    _reject_unknown(lstm_doc, {"hidden_dim", "seq_len", "learning_rate", "epochs",
                               "grad_clip"}, "lstm")
    train = TrainConfig(
        learning_rate=_get(lstm_doc, "learning_rate", 0.05, float, "lstm"),
        epochs=_get(lstm_doc, "epochs", 50, int, "lstm"),
        grad_clip=_get(lstm_doc, "grad_clip", 5.0, float, "lstm"),
    )
    return LstmSection(
        hidden_dim=_get(lstm_doc, "hidden_dim", 8, int, "lstm"),
        seq_len=_get(lstm_doc, "seq_len", 8, int, "lstm"),
        train=train,
    )


def _parse_simulate(doc: dict) -> SimulateSection:
    sim_doc = _require_mapping(doc.get("simulate", {}), "simulate")
    _reject_unknown(sim_doc, {"runs", "run_length", "sample_period_ms", "fault_onset",
                              "onset_jitter", "ramp", "label_horizon", "baselines"},
                    "simulate")
    baselines_doc = _require_mapping(
        sim_doc.get("baselines", {"vibration": {"mean": 2.0, "noise_dev": 0.4}}),
        "simulate.baselines")
    baselines = {}
    for name, entry in baselines_doc.items():
        channel = parse_channel(name)
        entry = _require_mapping(entry, f"simulate.baselines.{name}")
        _reject_unknown(entry, {"mean", "noise_dev"}, f"simulate.baselines.{name}")
        if "mean" not in entry or "noise_dev" not in entry:
            raise InvalidConfig(f"simulate.baselines.{name} needs mean and noise_dev")
        baselines[channel] = ChannelBaseline(
            mean=_get(entry, "mean", None, float, f"simulate.baselines.{name}"),
            noise_dev=_get(entry, "noise_dev", None, float, f"simulate.baselines.{name}"),
        )
    template = DegradationConfig(
        run_length=_get(sim_doc, "run_length", 2048, int, "simulate"),
        sample_period_ms=_get(sim_doc, "sample_period_ms", 1000, int, "simulate"),
        fault_onset=_get(sim_doc, "fault_onset", 1024, int, "simulate"),
        baselines=baselines,
        ramp=_get(sim_doc, "ramp", 0.02, float, "simulate"),
        onset_jitter=_get(sim_doc, "onset_jitter", 96, int, "simulate"),
    )
    return SimulateSection(
        runs=_get(sim_doc, "runs", 20, int, "simulate"),
        label_horizon=_get(sim_doc, "label_horizon", 128, int, "simulate"),
        template=template,
    )


def parse_config(doc: dict, env: dict | None = None) -> RunConfig:
    """Build a RunConfig from a parsed JSON document (strict keys)."""
    env = os.environ if env is None else env
    doc = _require_mapping(doc, "<root>")
    _reject_unknown(doc, {"seed", "paths", "filter", "windows", "svm", "lstm",
                          "alert", "fusion", "simulate", "benchmark"}, "<root>")

    seed = _get(doc, "seed", 42, int, "<root>")
    if SEED_ENV_VAR in env:
        raw = env[SEED_ENV_VAR]
        try:
            seed = int(raw)
        except ValueError:
            raise InvalidConfig(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None

    paths_doc = _require_mapping(doc.get("paths", {}), "paths")
    _reject_unknown(paths_doc, {"data", "models", "reports"}, "paths")
    paths = Paths(
        data=_get(paths_doc, "data", "data", str, "paths"),
        models=_get(paths_doc, "models", "models", str, "paths"),
        reports=_get(paths_doc, "reports", "reports", str, "paths"),
    )

    alert_doc = _require_mapping(doc.get("alert", {}), "alert")
    _reject_unknown(alert_doc, {"tau_ms", "sustain"}, "alert")
    alert_section = AlertSection(
        tau_ms=_get(alert_doc, "tau_ms", 600_000.0, float, "alert"),
        sustain=_get(alert_doc, "sustain", 2, int, "alert"),
    )

    fusion = _get(doc, "fusion", "or", str, "<root>")
    if fusion not in ("or", "and"):
        raise InvalidConfig(f"fusion must be 'or' or 'and', got {fusion!r}")

    bench_doc = _require_mapping(doc.get("benchmark", {}), "benchmark")
    _reject_unknown(bench_doc, {"train_runs", "test_runs"}, "benchmark")

    svm_cfg, kernel = _parse_svm(doc)
    return RunConfig(
        seed=seed,
        paths=paths,
        pipeline=_parse_filter_windows(doc),
        svm=svm_cfg,
        kernel=kernel,
        lstm=_parse_lstm(doc),
        alert=alert_section,
        fusion=fusion,
        simulate=_parse_simulate(doc),
        train_runs=_get(bench_doc, "train_runs", 20, int, "benchmark"),
        test_runs=_get(bench_doc, "test_runs", 10, int, "benchmark"),
    )


def load_config(path: str | Path | None, env: dict | None = None) -> RunConfig:
    """Load a config file (or all defaults when path is None)."""
    if path is None:
        return parse_config({}, env=env)
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"config {path} is not valid JSON: {exc}") from None
    return parse_config(doc, env=env)
