"""Command-line entry points.

Subcommands: simulate, features, train-svm, train-lstm, train-rul,
evaluate, monitor, cost. Exit codes: 0 success, 1 usage error, 2 data or
validation error, 3 numerical failure. Given identical inputs and seed,
every subcommand writes byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections import deque
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bench
from .config import RunConfig, load_config
from .decision import AlertPolicy, alert, cost_report, cost_report_csv, load_cost_csv
from .errors import (
    DataError,
    DuplicateTimestamp,
    EmptyInput,
    MalformedRow,
    NonFiniteValue,
    NumericalError,
    PdmError,
    UnknownChannel,
)
from .features import extract_features
from .rul import LstmModel, RulLinearModel, lstm_forward, lstm_train, rul_fit_linear, rul_predict_linear
from .serialize import load_model, save_model, write_json
from .signals import (
    CSV_HEADER,
    Channel,
    FilterConfig,
    SensorSeries,
    Window,
    channel_order,
    load_csv,
    moving_average,
    parse_channel,
    save_csv,
)
from .svm import svm_train

FEATURES_CSV_HEADER = "machine_id,channel,window_end_ms,sigma,rms,entropy_bits,kurtosis,rul_ms,label"
MONITOR_HEADER = "timestamp_ms,machine_id,rul_hat_ms,alert"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we want exit code 1
        raise _UsageError(message)


# --- shared file helpers -------------------------------------------------------


def _load_ground_truth(path: str | Path) -> dict[str, int]:
    """JSONL of {"run_id": ..., "fault_onset_ms": ...} keyed by run id."""
    out: dict[str, int] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError:
            raise MalformedRow(f"{path}:{lineno}: bad JSON line") from None
        if not isinstance(doc, dict) or set(doc) != {"run_id", "fault_onset_ms"}:
            raise MalformedRow(f"{path}:{lineno}: expected exactly run_id and fault_onset_ms")
        run_id = doc["run_id"]
        if not isinstance(run_id, str) or not run_id:
            raise MalformedRow(f"{path}:{lineno}: run_id must be a non-empty string")
        onset = doc["fault_onset_ms"]
        if isinstance(onset, bool) or not isinstance(onset, int):
            raise MalformedRow(f"{path}:{lineno}: fault_onset_ms must be an integer")
        if run_id in out:
            raise DuplicateTimestamp(f"{path}:{lineno}: duplicate run_id {run_id!r}")
        out[run_id] = onset
    if not out:
        raise EmptyInput(f"{path}: no ground-truth rows")
    return out


def _write_ground_truth(truths, path: Path) -> None:
    lines = [json.dumps({"run_id": t.run_id, "fault_onset_ms": t.fault_onset_ms},
                        sort_keys=True) for t in truths]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _format_opt(value) -> str:
    return "" if value is None else repr(float(value))


def _features_rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FEATURES_CSV_HEADER.split(","))
    for row in rows:
        writer.writerow([
            row["machine_id"], row["channel"].value, row["end_ms"],
            repr(float(row["quad"][0])), repr(float(row["quad"][1])),
            repr(float(row["quad"][2])), repr(float(row["quad"][3])),
            _format_opt(row.get("rul_ms")),
            "" if row.get("label") is None else row["label"],
        ])
    return buf.getvalue()


def _read_features_csv(path: str | Path) -> list[dict]:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(f"{path.name}: empty features file") from None
        if [h.strip() for h in header] != FEATURES_CSV_HEADER.split(","):
            raise MalformedRow(f"{path.name}: bad header, expected {FEATURES_CSV_HEADER!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 9:
                raise MalformedRow(f"{path.name}:{lineno}: expected 9 fields, got {len(row)}")
            try:
                quad = tuple(float(v) for v in row[3:7])
                end_ms = int(row[2])
            except ValueError:
                raise MalformedRow(f"{path.name}:{lineno}: bad numeric field") from None
            rul_ms = None if row[7] == "" else float(row[7])
            label = None if row[8] == "" else int(row[8])
            if label is not None and label not in (-1, 1):
                raise MalformedRow(f"{path.name}:{lineno}: label must be -1 or 1")
            rows.append({
                "machine_id": row[0],
                "channel": parse_channel(row[1]),
                "end_ms": end_ms,
                "quad": np.asarray(quad, dtype=np.float64),
                "rul_ms": rul_ms,
                "label": label,
            })
    if not rows:
        raise EmptyInput(f"{path.name}: no feature rows")
    return rows


def _single_channel(rows: list[dict]) -> None:
    channels = {row["channel"] for row in rows}
    if len(channels) > 1:
        names = ", ".join(sorted(ch.value for ch in channels))
        raise MalformedRow(f"features file mixes channels ({names}); train on one channel")


def _grouped_sequences(rows: list[dict], seq_len: int):
    """Per-machine (history, target) pairs for LSTM training."""
    by_machine: dict[str, list[dict]] = {}
    for row in rows:
        if row["rul_ms"] is None:
            raise MalformedRow("features file lacks rul_ms; regenerate with --ground-truth")
        by_machine.setdefault(row["machine_id"], []).append(row)
    data = []
    for machine in sorted(by_machine):
        entries = sorted(by_machine[machine], key=lambda r: r["end_ms"])
        quads = np.vstack([e["quad"] for e in entries])
        for j in range(seq_len - 1, len(entries)):
            data.append((quads[j - seq_len + 1 : j + 1], entries[j]["rul_ms"]))
    if not data:
        raise EmptyInput(f"no machine has {seq_len} consecutive windows")
    return data


# --- subcommands -----------------------------------------------------------------


def cmd_simulate(args, cfg: RunConfig) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    all_series, truths = [], []
    for i in range(cfg.simulate.runs):
        run_seed = cfg.seed + i
        run_cfg = replace(cfg.simulate.template, seed=run_seed)
        series, truth = bench.generate_degradation_run(run_cfg, run_id=f"run-{run_seed}")
        all_series.extend(series)
        truths.append(truth)
    sensors_path = out_dir / "sensors.csv"
    truth_path = out_dir / "ground_truth.jsonl"
    save_csv(all_series, sensors_path)
    _write_ground_truth(truths, truth_path)
    print(f"wrote {sensors_path} ({sum(len(s) for s in all_series)} samples, "
          f"{cfg.simulate.runs} runs)")
    print(f"wrote {truth_path}")
    if args.figures:
        from . import figures
        first = next(s for s in all_series if s.machine_id == truths[0].run_id
                     and s.channel is Channel.VIBRATION)
        smoothed = (moving_average(first, FilterConfig(cfg.pipeline.filter_k))
                    if cfg.pipeline.apply_filter else first)
        path = figures.render_run_overview(first, smoothed, truths[0].fault_onset_ms,
                                           out_dir / "run_overview.png")
        print(f"wrote {path}")
    return 0


def cmd_features(args, cfg: RunConfig) -> int:
    series_list = load_csv(args.data)
    truths = _load_ground_truth(args.ground_truth) if args.ground_truth else None
    period = cfg.simulate.template.sample_period_ms
    horizon = cfg.simulate.label_horizon
    rows = []
    for series in series_list:
        ends, feats = bench.windows_from_series(series, cfg.pipeline)
        if truths is not None:
            if series.machine_id not in truths:
                raise MalformedRow(f"no ground truth for machine {series.machine_id!r}")
            rul, labels = bench.label_windows(ends, truths[series.machine_id],
                                              horizon, period)
        for j in range(ends.shape[0]):
            rows.append({
                "machine_id": series.machine_id,
                "channel": series.channel,
                "end_ms": int(ends[j]),
                "quad": feats[j],
                "rul_ms": float(rul[j]) if truths is not None else None,
                "label": int(labels[j]) if truths is not None else None,
            })
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(_features_rows_csv(rows), encoding="utf-8", newline="\n")
    print(f"wrote {out} ({len(rows)} windows)")
    return 0


def cmd_train_svm(args, cfg: RunConfig) -> int:
    rows = _read_features_csv(args.features)
    _single_channel(rows)
    labeled = [r for r in rows if r["label"] is not None]
    if not labeled:
        raise MalformedRow("features file has no labels; regenerate with --ground-truth")
    x = np.vstack([r["quad"] for r in labeled])
    y = np.asarray([r["label"] for r in labeled], dtype=np.int64)
    model = svm_train(x, y, replace(cfg.svm, seed=cfg.seed), cfg.kernel)
    save_model(model, args.out)
    print(f"wrote {args.out} ({model.support_vectors.shape[0]} support vectors, "
          f"{len(labeled)} training rows)")
    return 0


def cmd_train_lstm(args, cfg: RunConfig) -> int:
    rows = _read_features_csv(args.features)
    _single_channel(rows)
    data = _grouped_sequences(rows, cfg.lstm.seq_len)
    model, loss_curve = lstm_train(data, replace(cfg.lstm.train, seed=cfg.seed),
                                   input_dim=4, hidden_dim=cfg.lstm.hidden_dim)
    save_model(model, args.out)
    print(f"wrote {args.out} ({len(data)} sequences, "
          f"final loss {loss_curve[-1]:.6g})")
    if args.loss_curve:
        Path(args.loss_curve).write_text(bench.loss_curve_csv(loss_curve),
                                         encoding="utf-8", newline="\n")
        print(f"wrote {args.loss_curve}")
    return 0


def cmd_train_rul(args, cfg: RunConfig) -> int:
    rows = _read_features_csv(args.features)
    _single_channel(rows)
    with_targets = [r for r in rows if r["rul_ms"] is not None]
    if not with_targets:
        raise MalformedRow("features file lacks rul_ms; regenerate with --ground-truth")
    x = np.vstack([r["quad"] for r in with_targets])
    y = np.asarray([r["rul_ms"] for r in with_targets], dtype=np.float64)
    model = rul_fit_linear(x, y)
    save_model(model, args.out)
    print(f"wrote {args.out} (beta0 {model.beta0:.6g}, {len(with_targets)} rows)")
    return 0


def cmd_evaluate(args, cfg: RunConfig) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = bench.run_benchmark(cfg.to_benchmark_config())

    write_json(out_dir / "benchmark_report.json", report.to_json_dict())
    (out_dir / "metrics.csv").write_text(bench.metrics_csv(report.metrics),
                                         encoding="utf-8", newline="\n")
    (out_dir / "lead_times.csv").write_text(bench.lead_times_csv(report.lead),
                                            encoding="utf-8", newline="\n")
    (out_dir / "loss_curve.csv").write_text(bench.loss_curve_csv(report.loss_curve),
                                            encoding="utf-8", newline="\n")
    for name in ("benchmark_report.json", "metrics.csv", "lead_times.csv", "loss_curve.csv"):
        print(f"wrote {out_dir / name}")

    if not args.no_figures:
        from . import figures
        figures.render_metrics_bars(report.metrics.to_json_dict(),
                                    out_dir / "metrics.png")
        figures.render_loss_curve(report.loss_curve, out_dir / "loss_curve.png")
        leads = [r["lead_ms"] for r in report.lead.per_run if r["detected"]]
        figures.render_lead_time_hist(leads, out_dir / "lead_times.png")
        first_test_seed = cfg.seed + cfg.train_runs
        series, truth = bench.generate_degradation_run(
            replace(cfg.simulate.template, seed=first_test_seed),
            run_id=f"run-{first_test_seed}")
        vib = next(s for s in series if s.channel is Channel.VIBRATION)
        smoothed = (moving_average(vib, FilterConfig(cfg.pipeline.filter_k))
                    if cfg.pipeline.apply_filter else vib)
        figures.render_run_overview(vib, smoothed, truth.fault_onset_ms,
                                    out_dir / "run_overview.png")
        for name in ("metrics.png", "loss_curve.png", "lead_times.png", "run_overview.png"):
            print(f"wrote {out_dir / name}")

    hybrid_cm, hybrid_scores = report.metrics.entries["hybrid"]
    lead_txt = ("n/a" if report.lead.median_lead_ms is None
                else f"{report.lead.median_lead_ms:.0f} ms")
    recall_txt = "n/a" if hybrid_scores.recall is None else f"{hybrid_scores.recall:.3f}"
    print(f"benchmark: {report.dataset['test_rows']} test rows, "
          f"hybrid recall {recall_txt}, median lead {lead_txt}")
    return 0


def cmd_monitor(args, cfg: RunConfig) -> int:
    model = load_model(args.model)
    if not isinstance(model, (LstmModel, RulLinearModel)):
        raise MalformedRow("monitor needs an lstm or rul_linear model (svm has no RUL)")
    channel = parse_channel(args.channel)
    policy = AlertPolicy(tau_ms=cfg.alert.tau_ms)
    k = cfg.pipeline.filter_k
    width = cfg.pipeline.window_width
    stride = cfg.pipeline.window_stride
    seq_len = cfg.lstm.seq_len

    if args.data == "-":
        stream = sys.stdin
        close = False
    else:
        stream = Path(args.data).open("r", encoding="utf-8", newline="")
        close = True
    sink = sys.stdout if args.out is None else Path(args.out).open(
        "w", encoding="utf-8", newline="\n")
    try:
        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow("empty stream (expected sensor CSV header)") from None
        if [h.strip() for h in header] != CSV_HEADER.split(","):
            raise MalformedRow(f"bad stream header, expected {CSV_HEADER!r}")

        sink.write(MONITOR_HEADER + "\n")
        state: dict[str, dict] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise MalformedRow(f"stream line {lineno}: expected 4 fields")
            try:
                ts = int(row[0])
                value = float(row[3])
            except ValueError:
                raise MalformedRow(f"stream line {lineno}: bad timestamp or value") from None
            machine_id = row[1]
            if not machine_id:
                raise MalformedRow(f"stream line {lineno}: empty machine_id")
            if parse_channel(row[2]) is not channel:
                continue
            if not np.isfinite(value):
                raise NonFiniteValue(f"stream line {lineno}: non-finite value")
            st = state.setdefault(machine_id, {
                "last_ts": None,
                "raw": deque(maxlen=k),
                "smoothed": deque(maxlen=width),
                "count": 0,
                "history": deque(maxlen=seq_len),
            })
            if st["last_ts"] is not None and ts <= st["last_ts"]:
                raise DuplicateTimestamp(
                    f"stream line {lineno}: timestamp {ts} not increasing for {machine_id}")
            st["last_ts"] = ts

            if cfg.pipeline.apply_filter:
                st["raw"].append(value)
                if len(st["raw"]) < k:
                    continue
                arr = np.asarray(st["raw"], dtype=np.float64)
                smoothed_value = float(arr[0] + (arr - arr[0]).sum() / k)
            else:
                smoothed_value = value
            st["smoothed"].append(smoothed_value)
            st["count"] += 1
            if st["count"] < width or (st["count"] - width) % stride != 0:
                continue

            window = Window(machine_id=machine_id, channel=channel,
                            start_index=st["count"] - width,
                            samples=np.asarray(st["smoothed"], dtype=np.float64))
            quad = extract_features(window).values
            if isinstance(model, LstmModel):
                st["history"].append(quad)
                rul_hat, _ = lstm_forward(model, np.vstack(st["history"]))
            else:
                rul_hat = rul_predict_linear(model, quad)
            sink.write(f"{ts},{machine_id},{rul_hat!r},{alert(rul_hat, policy)}\n")
    finally:
        if close:
            stream.close()
        if sink is not sys.stdout:
            sink.close()
    return 0


def cmd_cost(args, cfg: RunConfig) -> int:
    ledgers = load_cost_csv(args.costs)
    if len(ledgers) != 2:
        raise MalformedRow(f"cost file must hold exactly 2 rows (before, after), "
                           f"got {len(ledgers)}")
    report = cost_report(ledgers[0], ledgers[1])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(out_dir / "cost_report.json", report)
    (out_dir / "cost_report.csv").write_text(cost_report_csv(report),
                                             encoding="utf-8", newline="\n")
    print(f"wrote {out_dir / 'cost_report.json'}")
    print(f"wrote {out_dir / 'cost_report.csv'}")
    if not args.no_figures:
        from . import figures
        figures.render_cost_bars(report, out_dir / "cost_report.png")
        print(f"wrote {out_dir / 'cost_report.png'}")
    print(f"delta: {report['delta_usd']} USD/month "
          f"(before {report['before']['total_usd']}, after {report['after']['total_usd']})")
    return 0


# --- parser & entry ---------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="pdmkit",
                     description="Predictive-maintenance pipeline: simulate, extract "
                                 "features, train failure models, evaluate, monitor, "
                                 "and cost out the results.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="JSON config file (defaults apply)")
        p.set_defaults(handler=func)
        return p

    p = add("simulate", cmd_simulate, "generate synthetic degradation runs")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--figures", action="store_true", help="also render a run overview PNG")

    p = add("features", cmd_features, "window a sensor CSV and extract features")
    p.add_argument("--data", required=True, help="sensor CSV")
    p.add_argument("--ground-truth", default=None, help="ground-truth JSONL for labels")
    p.add_argument("--out", required=True, help="features CSV to write")

    p = add("train-svm", cmd_train_svm, "train the failure classifier")
    p.add_argument("--features", required=True, help="labeled features CSV")
    p.add_argument("--out", required=True, help="model JSON to write")

    p = add("train-lstm", cmd_train_lstm, "train the sequence RUL estimator")
    p.add_argument("--features", required=True, help="features CSV with rul_ms")
    p.add_argument("--out", required=True, help="model JSON to write")
    p.add_argument("--loss-curve", default=None, help="optional loss-curve CSV")

    p = add("train-rul", cmd_train_rul, "fit the linear RUL model")
    p.add_argument("--features", required=True, help="features CSV with rul_ms")
    p.add_argument("--out", required=True, help="model JSON to write")

    p = add("evaluate", cmd_evaluate, "run the end-to-end benchmark and report")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    p = add("monitor", cmd_monitor, "stream a sensor CSV and emit alert lines")
    p.add_argument("--model", required=True, help="lstm or rul_linear model JSON")
    p.add_argument("--data", required=True, help="sensor CSV path, or - for stdin")
    p.add_argument("--channel", default="vibration", help="channel to monitor")
    p.add_argument("--out", default=None, help="write lines here instead of stdout")

    p = add("cost", cmd_cost, "compare before/after maintenance cost ledgers")
    p.add_argument("--costs", required=True, help="cost CSV with before and after rows")
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"pdmkit: usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
        return int(args.handler(args, cfg) or 0)
    except NumericalError as exc:
        print(f"pdmkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (DataError, PdmError) as exc:
        print(f"pdmkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"pdmkit: cannot access file: {exc}", file=sys.stderr)
        return 2


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
