"""Sensor CSV ingestion, smoothing, and windowing."""

import numpy as np
import pytest

from pdmkit import Channel, FilterConfig, SensorSeries, make_windows, moving_average
from pdmkit.errors import (
    DuplicateTimestamp,
    EmptyInput,
    InvalidWidth,
    MalformedRow,
    NonFiniteValue,
    SeriesTooShort,
    UnknownChannel,
)
from pdmkit.signals import CSV_HEADER, dumps_csv, loads_csv, parse_channel


def _series(values, machine="m1", channel=Channel.VIBRATION, t0=0, dt=10):
    values = np.asarray(values, dtype=np.float64)
    ts = t0 + np.arange(values.shape[0], dtype=np.int64) * dt
    return SensorSeries(machine_id=machine, channel=channel, timestamps=ts, values=values)


# --- CSV ingestion -----------------------------------------------------------


def test_loads_csv_sorts_rows_and_groups():
    text = (
        f"{CSV_HEADER}\n"
        "30,m1,vibration,3.0\n"
        "10,m1,vibration,1.0\n"
        "20,m1,vibration,2.0\n"
        "10,m1,temperature,70.5\n"
        "10,m0,vibration,0.25\n"
    )
    series = loads_csv(text)
    assert [(s.machine_id, s.channel) for s in series] == [
        ("m0", Channel.VIBRATION),
        ("m1", Channel.VIBRATION),
        ("m1", Channel.TEMPERATURE),
    ]
    m1_vib = series[1]
    assert m1_vib.timestamps.tolist() == [10, 20, 30]
    assert m1_vib.values.tolist() == [1.0, 2.0, 3.0]


def test_loads_csv_rejects_bad_input():
    with pytest.raises(MalformedRow):
        loads_csv("wrong,header\n1,m,vibration,1.0\n")
    with pytest.raises(MalformedRow):
        loads_csv(f"{CSV_HEADER}\n1,m,vibration\n")
    with pytest.raises(MalformedRow):
        loads_csv(f"{CSV_HEADER}\nnot_an_int,m,vibration,1.0\n")
    with pytest.raises(UnknownChannel):
        loads_csv(f"{CSV_HEADER}\n1,m,warp_flux,1.0\n")
    with pytest.raises(NonFiniteValue):
        loads_csv(f"{CSV_HEADER}\n1,m,vibration,nan\n")
    with pytest.raises(DuplicateTimestamp):
        loads_csv(f"{CSV_HEADER}\n1,m,vibration,1.0\n1,m,vibration,2.0\n")
    with pytest.raises(EmptyInput):
        loads_csv(f"{CSV_HEADER}\n")


def test_csv_round_trip_is_identity():
    rng = np.random.default_rng(0)
    series = [
        _series(rng.standard_normal(5), machine="a", channel=Channel.ACOUSTIC),
        _series(rng.standard_normal(7), machine="a", channel=Channel.VIBRATION),
        _series(rng.standard_normal(3), machine="b", channel=Channel.LOAD),
    ]
    text = dumps_csv(series)
    assert text == dumps_csv(loads_csv(text))


def test_parse_channel():
    assert parse_channel("vibration") is Channel.VIBRATION
    with pytest.raises(UnknownChannel):
        parse_channel("humidity")


def test_series_validation():
    with pytest.raises(DuplicateTimestamp):
        _series([1.0, 2.0], dt=0)
    with pytest.raises(NonFiniteValue):
        _series([1.0, np.inf])
    with pytest.raises(EmptyInput):
        _series([])


# --- moving average --------------------------------------------------------------


def test_moving_average_hand_example():
    out = moving_average(_series([1.0, 2.0, 3.0, 4.0]), FilterConfig(window_k=2))
    assert out.values.tolist() == [1.5, 2.5, 3.5]
    assert out.timestamps.tolist() == [10, 20, 30]


def test_moving_average_k1_is_identity():
    s = _series([4.0, 5.5, -1.0])
    out = moving_average(s, FilterConfig(window_k=1))
    assert np.array_equal(out.values, s.values)
    assert np.array_equal(out.timestamps, s.timestamps)


def test_moving_average_constant_exact():
    out = moving_average(_series([3.7] * 100), FilterConfig(window_k=7))
    assert np.all(out.values == 3.7)


def test_moving_average_matches_convolution():
    rng = np.random.default_rng(21)
    for _ in range(50):
        n = int(rng.integers(8, 200))
        k = int(rng.integers(1, 8))
        x = rng.standard_normal(n) * 5.0
        got = moving_average(_series(x), FilterConfig(window_k=k)).values
        want = np.convolve(x, np.ones(k) / k, mode="valid")
        assert np.max(np.abs(got - want)) <= 1e-12


def test_moving_average_too_short():
    with pytest.raises(SeriesTooShort):
        moving_average(_series([1.0, 2.0]), FilterConfig(window_k=3))


# --- windowing --------------------------------------------------------------------


def test_make_windows_offsets():
    s = _series(np.arange(10.0))
    wins = make_windows(s, width=8, stride=1)
    assert [w.start_index for w in wins] == [0, 1, 2]
    assert wins[1].samples.tolist() == list(np.arange(1.0, 9.0))


def test_make_windows_stride_skips():
    s = _series(np.arange(64.0))
    wins = make_windows(s, width=16, stride=16)
    assert [w.start_index for w in wins] == [0, 16, 32, 48]


def test_make_windows_validation():
    s = _series(np.arange(16.0))
    with pytest.raises(InvalidWidth):
        make_windows(s, width=12, stride=1)
    with pytest.raises(InvalidWidth):
        make_windows(s, width=8, stride=0)
    with pytest.raises(SeriesTooShort):
        make_windows(s, width=32, stride=1)
