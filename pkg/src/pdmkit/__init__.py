"""Predictive-maintenance toolkit.

Turns raw sensor CSVs into smoothed, windowed feature vectors, trains a
failure classifier (SVM), two remaining-useful-life estimators (LSTM and
linear), fuses their alerts, and accounts for the maintenance costs the
alerts avoid. Everything is seeded and reruns byte-identically.
"""

from .bench import (
    BenchmarkConfig,
    BenchmarkReport,
    ChannelBaseline,
    DegradationConfig,
    LeadTimeStats,
    PipelineConfig,
    RunTruth,
    RunWindows,
    assemble_examples,
    generate_dataset,
    generate_degradation_run,
    label_windows,
    lead_time_for_run,
    lead_times_csv,
    loss_curve_csv,
    metrics_csv,
    run_benchmark,
    windows_from_series,
)
from .config import RunConfig, load_config, parse_config
from .decision import (
    AlertPolicy,
    CostLedger,
    alert,
    cents_to_usd,
    cost_report,
    cost_report_csv,
    load_cost_csv,
    savings_cents,
    usd_to_cents,
)
from .errors import (
    DataError,
    InvalidConfig,
    NoConvergence,
    NonFiniteLoss,
    NumericalError,
    PdmError,
)
from .evaluation import (
    ConfusionMatrix,
    MetricScores,
    MetricsReport,
    confusion_matrix,
    evaluate_models,
    fuse_predictions,
    precision_recall_f1,
)
from .features import (
    FEATURE_NAMES,
    FeatureVector,
    PowerSpectrum,
    extract_features,
    kurtosis,
    one_sided_periodogram,
    power_spectrum,
    rms,
    spectral_entropy,
    std_dev,
)
from .rul import (
    LstmCellState,
    LstmModel,
    RulLinearModel,
    TrainConfig,
    lstm_cell_step,
    lstm_forward,
    lstm_train,
    rul_fit_linear,
    rul_predict_linear,
)
from .serialize import canonical_json, load_model, read_json, save_model, write_json
from .signals import (
    CSV_HEADER,
    Channel,
    FilterConfig,
    SensorSeries,
    Window,
    load_csv,
    loads_csv,
    make_windows,
    moving_average,
    save_csv,
)
from .svm import (
    KernelSpec,
    SvmConfig,
    SvmModel,
    kernel_eval,
    svm_decision,
    svm_predict_proba,
    svm_score,
    svm_train,
)

__version__ = "0.1.0"

__all__ = [
    "AlertPolicy",
    "BenchmarkConfig",
    "BenchmarkReport",
    "CSV_HEADER",
    "Channel",
    "ChannelBaseline",
    "ConfusionMatrix",
    "CostLedger",
    "DataError",
    "DegradationConfig",
    "FEATURE_NAMES",
    "FeatureVector",
    "FilterConfig",
    "InvalidConfig",
    "KernelSpec",
    "LeadTimeStats",
    "LstmCellState",
    "LstmModel",
    "MetricScores",
    "MetricsReport",
    "NoConvergence",
    "NonFiniteLoss",
    "NumericalError",
    "PdmError",
    "PipelineConfig",
    "PowerSpectrum",
    "RulLinearModel",
    "RunConfig",
    "RunTruth",
    "RunWindows",
    "SensorSeries",
    "SvmConfig",
    "SvmModel",
    "TrainConfig",
    "Window",
    "alert",
    "assemble_examples",
    "canonical_json",
    "cents_to_usd",
    "confusion_matrix",
    "cost_report",
    "cost_report_csv",
    "evaluate_models",
    "extract_features",
    "fuse_predictions",
    "generate_dataset",
    "generate_degradation_run",
    "kernel_eval",
    "kurtosis",
    "label_windows",
    "lead_time_for_run",
    "lead_times_csv",
    "load_config",
    "load_cost_csv",
    "load_csv",
    "load_model",
    "loads_csv",
    "loss_curve_csv",
    "lstm_cell_step",
    "lstm_forward",
    "lstm_train",
    "make_windows",
    "metrics_csv",
    "moving_average",
    "one_sided_periodogram",
    "parse_config",
    "power_spectrum",
    "precision_recall_f1",
    "read_json",
    "rms",
    "rul_fit_linear",
    "rul_predict_linear",
    "run_benchmark",
    "save_csv",
    "save_model",
    "savings_cents",
    "spectral_entropy",
    "std_dev",
    "svm_decision",
    "svm_predict_proba",
    "svm_score",
    "svm_train",
    "usd_to_cents",
    "windows_from_series",
    "write_json",
]
