"""Per-window condition indicators: sigma, RMS, spectral entropy, kurtosis.

All moments are population moments (divide by N). The spectrum comes from a
native radix-2 DFT folded one-sided; entropy is measured in bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    InvalidWidth,
    NonFiniteValue,
    SigmaZero,
    ZeroPower,
)
from .signals import Channel, Window, channel_order

FEATURE_NAMES = ("sigma", "rms", "entropy_bits", "kurtosis")
FEATURES_PER_CHANNEL = len(FEATURE_NAMES)


def _as_samples(values) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch("expected a 1-D sample array")
    if x.shape[0] == 0:
        raise EmptyInput("no samples")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("samples must be finite")
    return x


def std_dev(values) -> float:
    """Population standard deviation: sqrt(mean((x - mean)^2))."""
    x = _as_samples(values)
    mu = x.mean()
    return float(np.sqrt(np.mean((x - mu) ** 2)))


def rms(values) -> float:
    """Root mean square: sqrt(mean(x^2))."""
    x = _as_samples(values)
    return float(np.sqrt(np.mean(x * x)))


def kurtosis(values) -> float:
    """Population kurtosis mean(((x - mu)/sigma)^4), not excess (Gaussian ~ 3)."""
    x = _as_samples(values)
    if x.shape[0] < 2:
        raise EmptyInput("kurtosis needs at least 2 samples")
    mu = x.mean()
    centered = x - mu
    var = np.mean(centered**2)
    if var == 0.0:
        raise SigmaZero("kurtosis undefined for a constant window")
    return float(np.mean(centered**4) / (var * var))


# --- spectrum ----------------------------------------------------------------


def _fft(x: np.ndarray) -> np.ndarray:
    """Recursive radix-2 decimation-in-time FFT (length must be a power of two)."""
    n = x.shape[0]
    if n == 1:
        return x.astype(np.complex128)
    even = _fft(x[0::2])
    odd = _fft(x[1::2])
    twiddled = np.exp(-2j * np.pi * np.arange(n // 2) / n) * odd
    return np.concatenate([even + twiddled, even - twiddled])


def one_sided_periodogram(values) -> np.ndarray:
    """One-sided bin powers |X_j|^2 / W for j = 0..W/2.

    Interior bins are doubled to fold the negative frequencies, so the total
    equals W * mean(x^2) (Parseval). Requires a power-of-two width >= 8.
    """
    x = _as_samples(values)
    w = x.shape[0]
    if w < 8 or w & (w - 1) != 0:
        raise InvalidWidth(f"spectrum width must be a power of two >= 8, got {w}")
    spectrum = _fft(x)[: w // 2 + 1]
    powers = (spectrum.real**2 + spectrum.imag**2) / w
    powers[1 : w // 2] *= 2.0
    return powers


@dataclass(frozen=True)
class PowerSpectrum:
    """Normalized one-sided spectral distribution (probabilities sum to 1)."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or p.shape[0] < 1:
            raise DimensionMismatch("spectrum probabilities must be a non-empty 1-D array")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise NonFiniteValue("spectrum probabilities must be finite and >= 0")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise ZeroPower(f"spectrum probabilities must sum to 1, got {p.sum()!r}")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    def __len__(self) -> int:
        return int(self.p.shape[0])


def power_spectrum(values) -> PowerSpectrum:
    """Normalized one-sided periodogram of a window."""
    powers = one_sided_periodogram(values)
    total = float(powers.sum())
    if total <= 0.0:
        raise ZeroPower("all-zero window has no spectral energy to normalize")
    return PowerSpectrum(p=powers / total)


def spectral_entropy(spectrum: PowerSpectrum) -> float:
    """Shannon entropy of the spectral distribution in bits, with 0*log2(0) = 0."""
    p = spectrum.p
    nonzero = p[p > 0.0]
    return float(-np.sum(nonzero * np.log2(nonzero))) + 0.0  # never -0.0


# --- feature vectors ---------------------------------------------------------


@dataclass(frozen=True)
class FeatureVector:
    """(sigma, rms, entropy_bits, kurtosis) blocks, one per channel.

    Channels appear in canonical enum order; ``values`` concatenates the
    4-feature block of each channel in that order.
    """

    channels: tuple[Channel, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if len(self.channels) == 0:
            raise EmptyInput("feature vector needs at least one channel")
        if values.shape != (FEATURES_PER_CHANNEL * len(self.channels),):
            raise DimensionMismatch(
                f"expected {FEATURES_PER_CHANNEL} values per channel, got shape {values.shape}"
            )
        orders = [channel_order(ch) for ch in self.channels]
        if sorted(set(orders)) != orders:
            raise DimensionMismatch("channels must be unique and in canonical order")
        if not np.all(np.isfinite(values)):
            raise NonFiniteValue("feature values must be finite")
        for i in range(len(self.channels)):
            sigma, rms_value, entropy_bits, kurt = values[4 * i : 4 * i + 4]
            if sigma < 0 or rms_value < 0 or entropy_bits < 0 or kurt < 1.0 - 1e-9:
                raise NonFiniteValue(
                    f"feature block for {self.channels[i].value} violates its bounds"
                )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def single(cls, channel: Channel, sigma: float, rms_value: float,
               entropy_bits: float, kurt: float) -> "FeatureVector":
        return cls(channels=(channel,),
                   values=np.asarray([sigma, rms_value, entropy_bits, kurt], dtype=np.float64))

    @classmethod
    def combine(cls, parts: list["FeatureVector"]) -> "FeatureVector":
        """Concatenate single- or multi-channel vectors into canonical order."""
        blocks: dict[Channel, np.ndarray] = {}
        for part in parts:
            for i, ch in enumerate(part.channels):
                if ch in blocks:
                    raise DimensionMismatch(f"duplicate channel {ch.value} while combining")
                blocks[ch] = part.values[4 * i : 4 * i + 4]
        channels = tuple(sorted(blocks, key=channel_order))
        return cls(channels=channels, values=np.concatenate([blocks[ch] for ch in channels]))

    def quad(self, channel: Channel) -> tuple[float, float, float, float]:
        """The (sigma, rms, entropy_bits, kurtosis) block for one channel."""
        i = self.channels.index(channel)
        return tuple(float(v) for v in self.values[4 * i : 4 * i + 4])


def extract_features(window: Window) -> FeatureVector:
    """Compute the four indicators of one window."""
    samples = window.samples
    sigma = std_dev(samples)
    if sigma == 0.0:
        raise SigmaZero("constant window has no spread")
    return FeatureVector.single(
        window.channel,
        sigma,
        rms(samples),
        spectral_entropy(power_spectrum(samples)),
        kurtosis(samples),
    )
