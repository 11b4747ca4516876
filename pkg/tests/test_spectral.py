"""Spectral forecastability and dominant-period detection."""

import numpy as np
import pytest

from ldmts.spectral import (
    ConstantInputWarning,
    dominant_frequency_bin,
    dominant_period,
    spectral_forecastability,
)


def test_pure_tone_scores_one():
    t = np.arange(240.0)
    x = np.sin(2 * np.pi * t / 24)  # period divides the length: single exact bin
    assert spectral_forecastability(x) == pytest.approx(1.0, abs=1e-9)


def test_white_noise_scores_low(rng):
    scores = [
        spectral_forecastability(rng.normal(size=2048)) for _ in range(5)
    ]
    assert max(scores) < 0.2


def test_score_range(rng):
    for _ in range(30):
        n = int(rng.integers(8, 500))
        s = spectral_forecastability(rng.normal(size=n))
        assert 0.0 <= s <= 1.0


def test_constant_input_warns_and_scores_one():
    with pytest.warns(ConstantInputWarning):
        assert spectral_forecastability(np.full(64, 2.5)) == 1.0


def test_mean_removal_makes_offset_irrelevant(rng):
    x = rng.normal(size=256)
    a = spectral_forecastability(x)
    b = spectral_forecastability(x + 100.0)
    assert a == pytest.approx(b, abs=1e-9)


def test_short_input_rejected():
    with pytest.raises(ValueError, match="at least 8"):
        spectral_forecastability(np.arange(7.0))


def test_dominant_period_exact_bins():
    t = np.arange(3360.0)
    assert dominant_period(np.sin(2 * np.pi * t / 24)) == pytest.approx(24.0)
    assert dominant_period(np.sin(2 * np.pi * t / 168)) == pytest.approx(168.0)
    assert dominant_frequency_bin(np.sin(2 * np.pi * t / 24)) == 140


def test_dominant_period_rate_scaling():
    # 280 samples at rate 12 cover 3360 original steps; a 14-sample cycle is period 168
    k = np.arange(280.0)
    x = np.sin(2 * np.pi * k / 14)
    assert dominant_period(x, rate=12) == pytest.approx(168.0)


def test_concentration_orders_scores(rng):
    t = np.arange(1024.0)
    tone = np.sin(2 * np.pi * t / 32)
    noisy = tone + 0.5 * rng.normal(size=t.size)
    assert spectral_forecastability(tone) > spectral_forecastability(noisy)
