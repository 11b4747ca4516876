"""Power-spectrum diagnostics: a forecastability score and dominant-period lookup."""

from __future__ import annotations

import warnings

import numpy as np

from .validation import as_float_vector


class ConstantInputWarning(UserWarning):
    """The input is constant; the spectral score defaults to 1."""


MIN_LENGTH = 8


def positive_power_spectrum(values) -> np.ndarray:
    """Power over the positive DFT frequencies of the mean-removed input."""
    x = as_float_vector(values, "values")
    if x.size < MIN_LENGTH:
        raise ValueError(f"need at least {MIN_LENGTH} samples, got {x.size}")
    x = x - x.mean()
    return np.abs(np.fft.rfft(x)[1:]) ** 2


def spectral_forecastability(values) -> float:
    """One minus the normalized Shannon entropy of the power spectrum, in [0, 1].

    The mean-removed power spectrum over positive frequencies is normalized to
    a probability distribution; its entropy (natural log) is divided by
    log(number of bins). Concentrated spectra score near 1, white noise near 0.
    Constant input scores 1.0 and emits a ConstantInputWarning.
    """
    power = positive_power_spectrum(values)
    total = power.sum()
    if total == 0.0:
        warnings.warn("constant input has an empty spectrum", ConstantInputWarning, stacklevel=2)
        return 1.0
    q = power / total
    q = q[q > 0.0]
    entropy = -float(np.sum(q * np.log(q)))
    return float(np.clip(1.0 - entropy / np.log(power.size), 0.0, 1.0))


def dominant_frequency_bin(values) -> int:
    """Index (1-based over the DFT bins) of the strongest positive frequency."""
    power = positive_power_spectrum(values)
    return int(np.argmax(power)) + 1


def dominant_period(values, rate: int = 1) -> float:
    """Period of the strongest positive frequency, in original time units.

    For a component sampled every ``rate`` original steps, the detected period
    (n / k samples for bin k) is scaled back by the rate.
    """
    x = as_float_vector(values, "values")
    k = dominant_frequency_bin(x)
    return x.size / k * rate
