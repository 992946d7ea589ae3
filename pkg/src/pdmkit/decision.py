"""Alert policy and maintenance cost accounting.

Currency is held in integer cents end to end so ledger totals and deltas
are exact. The savings figure S = C_p - (C_f + C_d) follows the source
convention even though a positive delta shows up as negative S; reports
therefore carry S_alt = (C_f + C_d) - C_p alongside, with a note.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path

from .errors import EmptyInput, InvalidConfig, MalformedRow

COST_CSV_HEADER = "period,preventive_usd,corrective_usd,failure_recovery_usd"

SAVINGS_NOTE = (
    "savings_cents follows S = preventive - (corrective + failure_recovery); "
    "a cheaper-to-run plant therefore shows negative S. savings_alt_cents flips "
    "the sign so that positive means money saved."
)


@dataclass(frozen=True)
class AlertPolicy:
    """Alert when predicted RUL falls to tau_ms or below."""

    tau_ms: float

    def __post_init__(self):
        if not self.tau_ms >= 0:
            raise InvalidConfig(f"tau_ms must be >= 0, got {self.tau_ms!r}")


def alert(rul_hat_ms: float, policy: AlertPolicy) -> int:
    """1 if rul_hat_ms <= tau, else 0."""
    return 1 if rul_hat_ms <= policy.tau_ms else 0


# --- currency ------------------------------------------------------------------


def usd_to_cents(text) -> int:
    """Parse a dollar amount with at most two decimals into integer cents."""
    try:
        amount = Decimal(str(text).strip())
    except InvalidOperation:
        raise MalformedRow(f"bad currency amount {text!r}") from None
    if not amount.is_finite():
        raise MalformedRow(f"currency amount must be finite, got {text!r}")
    cents = amount * 100
    if cents != cents.to_integral_value():
        raise MalformedRow(f"currency amount {text!r} has sub-cent precision")
    if cents < 0:
        raise MalformedRow(f"currency amount must be >= 0, got {text!r}")
    return int(cents)


def cents_to_usd(cents: int) -> str:
    """Render integer cents as a plain dollars string with two decimals."""
    sign = "-" if cents < 0 else ""
    magnitude = abs(int(cents))
    return f"{sign}{magnitude // 100}.{magnitude % 100:02d}"


@dataclass(frozen=True)
class CostLedger:
    """Monthly maintenance spend for one period, in integer cents."""

    period: str
    preventive_cents: int
    corrective_cents: int
    failure_recovery_cents: int

    def __post_init__(self):
        if not self.period:
            raise MalformedRow("ledger period must be non-empty")
        for name in ("preventive_cents", "corrective_cents", "failure_recovery_cents"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise MalformedRow(f"{name} must be a nonnegative integer, got {v!r}")

    @property
    def total_cents(self) -> int:
        return self.preventive_cents + self.corrective_cents + self.failure_recovery_cents


def savings_cents(preventive_cents: int, corrective_cents: int,
                  failure_recovery_cents: int) -> int:
    """S = C_p - (C_f + C_d), in cents."""
    return preventive_cents - (corrective_cents + failure_recovery_cents)


def load_cost_csv(path: str | Path) -> list[CostLedger]:
    """Read period cost rows; header must match the published format exactly."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(f"{path.name}: empty cost file") from None
        if [h.strip() for h in header] != COST_CSV_HEADER.split(","):
            raise MalformedRow(f"{path.name}: bad header, expected {COST_CSV_HEADER!r}")
        ledgers = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise MalformedRow(f"{path.name}:{lineno}: expected 4 fields, got {len(row)}")
            ledgers.append(CostLedger(
                period=row[0],
                preventive_cents=usd_to_cents(row[1]),
                corrective_cents=usd_to_cents(row[2]),
                failure_recovery_cents=usd_to_cents(row[3]),
            ))
    if not ledgers:
        raise EmptyInput(f"{path.name}: no cost rows")
    return ledgers


def _ledger_dict(ledger: CostLedger) -> dict:
    s = savings_cents(ledger.preventive_cents, ledger.corrective_cents,
                      ledger.failure_recovery_cents)
    return {
        "period": ledger.period,
        "preventive_cents": ledger.preventive_cents,
        "corrective_cents": ledger.corrective_cents,
        "failure_recovery_cents": ledger.failure_recovery_cents,
        "total_cents": ledger.total_cents,
        "total_usd": cents_to_usd(ledger.total_cents),
        "savings_cents": s,
        "savings_alt_cents": -s,
    }


def cost_report(before: CostLedger, after: CostLedger) -> dict:
    """Totals for both periods plus the exact before-minus-after delta."""
    delta = before.total_cents - after.total_cents
    return {
        "schema_version": 1,
        "before": _ledger_dict(before),
        "after": _ledger_dict(after),
        "delta_cents": delta,
        "delta_usd": cents_to_usd(delta),
        "note": SAVINGS_NOTE,
    }


def cost_report_csv(report: dict) -> str:
    """Plot-ready CSV companion to the JSON cost report."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["period", "preventive_usd", "corrective_usd",
                     "failure_recovery_usd", "total_usd"])
    for key in ("before", "after"):
        entry = report[key]
        writer.writerow([
            entry["period"],
            cents_to_usd(entry["preventive_cents"]),
            cents_to_usd(entry["corrective_cents"]),
            cents_to_usd(entry["failure_recovery_cents"]),
            entry["total_usd"],
        ])
    writer.writerow(["delta", "", "", "", report["delta_usd"]])
    return buf.getvalue()
