"""Static PNG renderings of the delimited report outputs.

Every figure is drawn from the same data that lands in the CSV/JSON
reports; the tables remain the authoritative artifacts.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .signals import SensorSeries  # noqa: E402

_METRIC_NAMES = ("precision", "recall", "f1")


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def render_metrics_bars(metrics_doc: dict, path: str | Path) -> Path:
    """Grouped precision/recall/F1 bars, one group per model."""
    models = list(metrics_doc)
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.25
    for i, metric in enumerate(_METRIC_NAMES):
        values = [metrics_doc[m].get(metric) or 0.0 for m in models]
        ax.bar([x + (i - 1) * width for x in range(len(models))], values,
               width=width, label=metric)
    ax.set_xticks(range(len(models)))
    ax.set_xticklabels(models)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.set_title("Per-model classification scores")
    ax.legend()
    return _save(fig, path)


def render_loss_curve(loss_curve: list[float], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(range(len(loss_curve)), loss_curve)
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean squared error")
    ax.set_yscale("log")
    ax.set_title("LSTM training loss")
    return _save(fig, path)


def render_lead_time_hist(leads_ms: list[float], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    if leads_ms:
        ax.hist([v / 1000.0 for v in leads_ms], bins=10, edgecolor="black")
    ax.set_xlabel("alert lead time (s)")
    ax.set_ylabel("runs")
    ax.set_title("Hybrid alert lead time before fault")
    return _save(fig, path)


def render_run_overview(raw: SensorSeries, smoothed: SensorSeries,
                        fault_onset_ms: int, path: str | Path) -> Path:
    """Raw vs. smoothed vibration with the fault onset marked."""
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(raw.timestamps / 1000.0, raw.values, alpha=0.4, lw=0.6, label="raw")
    ax.plot(smoothed.timestamps / 1000.0, smoothed.values, lw=1.2, label="smoothed")
    ax.axvline(fault_onset_ms / 1000.0, color="red", ls="--", label="fault onset")
    ax.set_xlabel("time (s)")
    ax.set_ylabel(f"{raw.channel.value}")
    ax.set_title(f"{raw.machine_id}: signal and fault onset")
    ax.legend()
    return _save(fig, path)


def render_cost_bars(report: dict, path: str | Path) -> Path:
    """Before/after stacked cost bars from a cost report."""
    categories = ("preventive_cents", "corrective_cents", "failure_recovery_cents")
    labels = ("preventive", "corrective", "failure recovery")
    fig, ax = plt.subplots(figsize=(6, 4))
    for idx, key in enumerate(("before", "after")):
        bottom = 0.0
        for cat, lab in zip(categories, labels):
            value = report[key][cat] / 100.0
            ax.bar([idx], [value], bottom=bottom,
                   color=f"C{categories.index(cat)}",
                   label=lab if idx == 0 else None)
            bottom += value
    ax.set_xticks([0, 1])
    ax.set_xticklabels(["before", "after"])
    ax.set_ylabel("monthly cost (USD)")
    ax.set_title("Maintenance spend before vs. after")
    ax.legend()
    return _save(fig, path)
