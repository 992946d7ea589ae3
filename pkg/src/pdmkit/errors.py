"""Exception hierarchy for the pipeline.

Two families matter operationally: bad input (``DataError``) and numerical
failure during training (``NumericalError``). The CLI maps the former to
exit code 2 and the latter to exit code 3.
"""

from __future__ import annotations


class PdmError(Exception):
    """Base class for every error raised by this package."""


class DataError(PdmError):
    """Invalid data, configuration, or a violated input contract."""


class NumericalError(PdmError):
    """A numerical procedure failed to produce a usable result."""


# --- data / validation -----------------------------------------------------


class MalformedRow(DataError):
    """A CSV row that cannot be parsed against the expected header."""


class NonFiniteValue(DataError):
    """A sensor value or computed quantity is NaN or infinite."""


class DuplicateTimestamp(DataError):
    """Two samples of the same machine/channel share a timestamp."""


class UnknownChannel(DataError):
    """A channel name outside the supported enumeration."""


class SeriesTooShort(DataError):
    """A series shorter than the requested filter or window length."""


class InvalidWidth(DataError):
    """A window width that is not a power of two >= 8, or a bad stride."""


class EmptyInput(DataError):
    """An operation received no samples."""


class SigmaZero(DataError):
    """Standard deviation is zero where a nonzero spread is required."""


class ZeroPower(DataError):
    """A spectrum has no energy to normalize (all-zero window)."""


class DimensionMismatch(DataError):
    """Vector dimensions disagree (kernel arguments, model inputs)."""


class ShapeMismatch(DataError):
    """Array shapes disagree (feature matrix vs. targets, sequences)."""


class LengthMismatch(DataError):
    """Paired sequences have different lengths."""


class DegenerateLabels(DataError):
    """A training set containing only one class."""


class InsufficientData(DataError):
    """Too few rows to determine the requested fit."""


class UndefinedMetric(DataError):
    """A metric whose denominator is zero (no positive predictions/labels)."""


class InvalidConfig(DataError):
    """A configuration document with unknown keys or out-of-range values."""


# --- numerical -------------------------------------------------------------


class NoConvergence(NumericalError):
    """Optimizer exhausted its budget; carries best-iterate diagnostics."""

    def __init__(self, message: str, *, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NonFiniteLoss(NumericalError):
    """Training loss became NaN or infinite."""

    def __init__(self, message: str, *, epoch: int | None = None, loss: float | None = None):
        super().__init__(message)
        self.epoch = epoch
        self.loss = loss
