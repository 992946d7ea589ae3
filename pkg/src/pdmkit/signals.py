"""Sensor telemetry: CSV ingestion, moving-average smoothing, windowing.

The on-disk format is a UTF-8, LF-terminated CSV with the exact header
``timestamp_ms,machine_id,channel,value``. Rows may arrive unordered and
interleaved across machines; loading groups them per (machine, channel)
and sorts by timestamp.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    DuplicateTimestamp,
    EmptyInput,
    InvalidWidth,
    MalformedRow,
    NonFiniteValue,
    SeriesTooShort,
    UnknownChannel,
)

CSV_HEADER = "timestamp_ms,machine_id,channel,value"


class Channel(enum.Enum):
    """Supported sensor channels.

    Declaration order is load-bearing: it fixes the ordering of per-channel
    blocks in concatenated feature vectors.
    """

    VIBRATION = "vibration"      # mm/s
    TEMPERATURE = "temperature"  # degrees C
    PRESSURE = "pressure"        # kPa
    ACOUSTIC = "acoustic"        # dB
    CURRENT = "current"          # A
    LOAD = "load"                # percent


_CHANNEL_ORDER = {ch: i for i, ch in enumerate(Channel)}
_CHANNEL_BY_NAME = {ch.value: ch for ch in Channel}


def channel_order(ch: Channel) -> int:
    """Position of a channel in the canonical ordering."""
    return _CHANNEL_ORDER[ch]


def parse_channel(name: str) -> Channel:
    try:
        return _CHANNEL_BY_NAME[name]
    except KeyError:
        raise UnknownChannel(f"unknown channel {name!r}") from None


@dataclass
class SensorSeries:
    """One machine/channel stream: strictly increasing timestamps, finite values."""

    machine_id: str
    channel: Channel
    timestamps: np.ndarray  # int64 milliseconds
    values: np.ndarray      # float64

    def __post_init__(self):
        if not self.machine_id:
            raise MalformedRow("machine_id must be non-empty")
        ts = np.asarray(self.timestamps, dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.float64)
        if ts.ndim != 1 or vals.ndim != 1 or ts.shape[0] != vals.shape[0]:
            raise MalformedRow("timestamps and values must be 1-D and equal length")
        if ts.shape[0] == 0:
            raise EmptyInput("a series needs at least one sample")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteValue(f"non-finite value in series {self.machine_id}/{self.channel.value}")
        diffs = np.diff(ts)
        if np.any(diffs == 0):
            raise DuplicateTimestamp(
                f"duplicate timestamp in series {self.machine_id}/{self.channel.value}"
            )
        if np.any(diffs < 0):
            raise MalformedRow("timestamps must be strictly increasing")
        ts.flags.writeable = False
        vals.flags.writeable = False
        self.timestamps = ts
        self.values = vals

    def __len__(self) -> int:
        return int(self.timestamps.shape[0])


@dataclass(frozen=True)
class FilterConfig:
    """Moving-average length ``window_k`` (k = 1 passes samples through)."""

    window_k: int = 4

    def __post_init__(self):
        if not isinstance(self.window_k, int) or self.window_k < 1:
            raise InvalidWidth(f"filter window_k must be a positive integer, got {self.window_k!r}")


@dataclass
class Window:
    """A fixed-width slice of a series, optionally labeled for training."""

    machine_id: str
    channel: Channel
    start_index: int
    samples: np.ndarray
    label: bool | None = None
    rul_ms: int | None = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        _check_window_width(samples.shape[0])
        if not np.all(np.isfinite(samples)):
            raise NonFiniteValue("window samples must be finite")
        if self.rul_ms is not None and self.rul_ms < 0:
            raise MalformedRow("rul_ms label must be >= 0")
        self.samples = samples

    @property
    def width(self) -> int:
        return int(self.samples.shape[0])


def _check_window_width(width: int) -> None:
    if width < 8 or width & (width - 1) != 0:
        raise InvalidWidth(f"window width must be a power of two >= 8, got {width}")


# --- CSV ingestion ----------------------------------------------------------


def _parse_rows(lines, source: str) -> list[SensorSeries]:
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow(f"{source}: empty file (expected header {CSV_HEADER!r})") from None
    if [h.strip() for h in header] != CSV_HEADER.split(","):
        raise MalformedRow(f"{source}: bad header {','.join(header)!r}, expected {CSV_HEADER!r}")

    groups: dict[tuple[str, Channel], tuple[list[int], list[float]]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise MalformedRow(f"{source}:{lineno}: expected 4 fields, got {len(row)}")
        ts_text, machine_id, channel_name, value_text = row
        try:
            ts = int(ts_text)
        except ValueError:
            raise MalformedRow(f"{source}:{lineno}: bad timestamp {ts_text!r}") from None
        if not machine_id:
            raise MalformedRow(f"{source}:{lineno}: empty machine_id")
        channel = parse_channel(channel_name)
        try:
            value = float(value_text)
        except ValueError:
            raise MalformedRow(f"{source}:{lineno}: bad value {value_text!r}") from None
        if not np.isfinite(value):
            raise NonFiniteValue(f"{source}:{lineno}: non-finite value {value_text!r}")
        ts_list, val_list = groups.setdefault((machine_id, channel), ([], []))
        ts_list.append(ts)
        val_list.append(value)

    if not groups:
        raise EmptyInput(f"{source}: no data rows")

    out = []
    for (machine_id, channel) in sorted(groups, key=lambda k: (k[0], channel_order(k[1]))):
        ts_list, val_list = groups[(machine_id, channel)]
        order = np.argsort(np.asarray(ts_list, dtype=np.int64), kind="stable")
        out.append(
            SensorSeries(
                machine_id=machine_id,
                channel=channel,
                timestamps=np.asarray(ts_list, dtype=np.int64)[order],
                values=np.asarray(val_list, dtype=np.float64)[order],
            )
        )
    return out


def load_csv(path: str | Path) -> list[SensorSeries]:
    """Load sensor CSV into per-(machine, channel) series, sorted by timestamp.

    Every data row lands in exactly one series; malformed rows, unknown
    channels, non-finite values and duplicate timestamps are rejected.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        return _parse_rows(fh, source=path.name)


def loads_csv(text: str, source: str = "<string>") -> list[SensorSeries]:
    """``load_csv`` for in-memory text."""
    return _parse_rows(io.StringIO(text), source=source)


def dumps_csv(series_list: list[SensorSeries]) -> str:
    """Serialize series to the canonical CSV form.

    Groups are ordered by (machine_id, channel order), rows by timestamp,
    floats rendered with full round-trip precision; re-loading and
    re-serializing the result is byte-identical.
    """
    ordered = sorted(series_list, key=lambda s: (s.machine_id, channel_order(s.channel)))
    lines = [CSV_HEADER]
    for series in ordered:
        name = series.channel.value
        for ts, value in zip(series.timestamps, series.values):
            lines.append(f"{int(ts)},{series.machine_id},{name},{float(value)!r}")
    return "\n".join(lines) + "\n"


def save_csv(series_list: list[SensorSeries], path: str | Path) -> None:
    Path(path).write_text(dumps_csv(series_list), encoding="utf-8", newline="\n")


# --- smoothing and windowing -------------------------------------------------


def moving_average(series: SensorSeries, cfg: FilterConfig) -> SensorSeries:
    """Trailing moving average over the last ``k`` samples.

    Output sample t is the mean of input samples t-k+1..t, so the result is
    shorter by k-1 and keeps the timestamp of each window's last sample.
    Window sums are accumulated relative to the window's first sample, which
    keeps constant stretches exactly constant.
    """
    k = cfg.window_k
    n = len(series)
    if n < k:
        raise SeriesTooShort(f"series of length {n} is shorter than filter window k={k}")
    windows = sliding_window_view(series.values, k)
    base = windows[:, 0]
    smoothed = base + (windows - base[:, None]).sum(axis=1) / k
    return SensorSeries(
        machine_id=series.machine_id,
        channel=series.channel,
        timestamps=series.timestamps[k - 1 :],
        values=smoothed,
    )


def make_windows(series: SensorSeries, width: int, stride: int) -> list[Window]:
    """Slice a series into fixed-width windows at the given stride."""
    _check_window_width(width)
    if not isinstance(stride, int) or stride < 1:
        raise InvalidWidth(f"stride must be a positive integer, got {stride!r}")
    n = len(series)
    if n < width:
        raise SeriesTooShort(f"series of length {n} is shorter than window width {width}")
    out = []
    for start in range(0, n - width + 1, stride):
        out.append(
            Window(
                machine_id=series.machine_id,
                channel=series.channel,
                start_index=start,
                samples=series.values[start : start + width].copy(),
            )
        )
    return out
