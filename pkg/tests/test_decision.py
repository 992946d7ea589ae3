"""Alert rule and exact-cents cost accounting."""

import numpy as np
import pytest

from pdmkit import AlertPolicy, CostLedger, alert, cost_report, savings_cents
from pdmkit.decision import cents_to_usd, cost_report_csv, load_cost_csv, usd_to_cents
from pdmkit.errors import EmptyInput, InvalidConfig, MalformedRow

BEFORE = CostLedger(period="before", preventive_cents=200_000,
                    corrective_cents=350_000, failure_recovery_cents=430_000)
AFTER = CostLedger(period="after", preventive_cents=280_000,
                   corrective_cents=120_000, failure_recovery_cents=120_000)


# --- alert rule --------------------------------------------------------------


def test_alert_threshold_inclusive():
    policy = AlertPolicy(tau_ms=1000.0)
    assert alert(999.0, policy) == 1
    assert alert(1000.0, policy) == 1
    assert alert(1000.0001, policy) == 0


def test_alert_monotone_in_rul():
    policy = AlertPolicy(tau_ms=500.0)
    values = np.linspace(0.0, 2000.0, 101)
    flags = [alert(float(v), policy) for v in values]
    assert flags == sorted(flags, reverse=True)  # once safe, never re-alerts


def test_alert_policy_validation():
    with pytest.raises(InvalidConfig):
        AlertPolicy(tau_ms=-1.0)


# --- currency ---------------------------------------------------------------------


def test_usd_to_cents_parses_exactly():
    assert usd_to_cents("2000") == 200_000
    assert usd_to_cents("2000.5") == 200_050
    assert usd_to_cents("0.07") == 7
    assert usd_to_cents(" 12.00 ") == 1200


def test_usd_to_cents_rejects_bad_amounts():
    for bad in ("1.005", "-3", "abc", "nan", "inf"):
        with pytest.raises(MalformedRow):
            usd_to_cents(bad)


def test_cents_to_usd_formats():
    assert cents_to_usd(200_000) == "2000.00"
    assert cents_to_usd(7) == "0.07"
    assert cents_to_usd(-460_000) == "-4600.00"


# --- ledger arithmetic -------------------------------------------------------------


def test_monthly_totals_and_delta_exact():
    report = cost_report(BEFORE, AFTER)
    assert report["before"]["total_cents"] == 980_000
    assert report["after"]["total_cents"] == 520_000
    assert report["delta_cents"] == 460_000
    assert report["before"]["total_usd"] == "9800.00"
    assert report["after"]["total_usd"] == "5200.00"
    assert report["delta_usd"] == "4600.00"


def test_savings_convention_and_flip():
    # S = preventive - (corrective + failure recovery), kept as published even
    # though the month that *saves* money comes out negative; the _alt field
    # carries the flipped sign.
    assert savings_cents(200_000, 350_000, 430_000) == -580_000
    report = cost_report(BEFORE, AFTER)
    assert report["before"]["savings_cents"] == -580_000
    assert report["before"]["savings_alt_cents"] == 580_000
    assert report["after"]["savings_cents"] == 40_000
    assert report["after"]["savings_alt_cents"] == -40_000
    assert "savings_cents" in report["note"]


def test_ledger_validation():
    with pytest.raises(MalformedRow):
        CostLedger(period="", preventive_cents=1, corrective_cents=1,
                   failure_recovery_cents=1)
    with pytest.raises(MalformedRow):
        CostLedger(period="p", preventive_cents=-1, corrective_cents=0,
                   failure_recovery_cents=0)
    with pytest.raises(MalformedRow):
        CostLedger(period="p", preventive_cents=1.5, corrective_cents=0,
                   failure_recovery_cents=0)


# --- CSV in / out ---------------------------------------------------------------


def test_load_cost_csv(tmp_path):
    path = tmp_path / "costs.csv"
    path.write_text(
        "period,preventive_usd,corrective_usd,failure_recovery_usd\n"
        "before,2000,3500,4300\n"
        "after,2800,1200,1200\n",
        encoding="utf-8",
    )
    ledgers = load_cost_csv(path)
    assert ledgers == [BEFORE, AFTER]


def test_load_cost_csv_rejects(tmp_path):
    bad_header = tmp_path / "h.csv"
    bad_header.write_text("a,b,c,d\nx,1,2,3\n", encoding="utf-8")
    with pytest.raises(MalformedRow):
        load_cost_csv(bad_header)

    subcent = tmp_path / "s.csv"
    subcent.write_text(
        "period,preventive_usd,corrective_usd,failure_recovery_usd\n"
        "before,1.005,2,3\n",
        encoding="utf-8",
    )
    with pytest.raises(MalformedRow):
        load_cost_csv(subcent)

    empty = tmp_path / "e.csv"
    empty.write_text("period,preventive_usd,corrective_usd,failure_recovery_usd\n",
                     encoding="utf-8")
    with pytest.raises(EmptyInput):
        load_cost_csv(empty)


def test_cost_report_csv_layout():
    text = cost_report_csv(cost_report(BEFORE, AFTER))
    lines = text.splitlines()
    assert lines[0] == "period,preventive_usd,corrective_usd,failure_recovery_usd,total_usd"
    assert lines[1] == "before,2000.00,3500.00,4300.00,9800.00"
    assert lines[2] == "after,2800.00,1200.00,1200.00,5200.00"
    assert lines[3] == "delta,,,,4600.00"
    assert len(lines) == 4
