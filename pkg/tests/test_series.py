"""Containers, normalization, splits, and windowing."""

import numpy as np
import pytest

from ldmts.series import (
    SplitSpec,
    TimeSeries,
    ZeroVarianceWarning,
    apply_normalizer,
    chronological_split,
    fit_normalizer,
    invert_normalizer,
    mae,
    make_windows,
    mse,
    window_anchors,
)


def test_time_series_shapes_and_immutability():
    ts = TimeSeries(values=[1.0, 2.0, 3.0])
    assert ts.n_channels == 1 and ts.n_steps == 3
    with pytest.raises(ValueError):
        ts.values[0, 0] = 5.0

    ts2 = TimeSeries(values=np.zeros((2, 4)), channel_names=("a", "b"))
    assert ts2.channel_names == ("a", "b")
    with pytest.raises(ValueError):
        TimeSeries(values=np.zeros((2, 4)), channel_names=("only one",))
    with pytest.raises(ValueError):
        TimeSeries(values=np.zeros((2, 0)))
    with pytest.raises(ValueError):
        TimeSeries(values=[1.0, np.nan])
    with pytest.raises((ValueError, TypeError)):
        TimeSeries(values=[1.0, 2.0], rate=0)


def test_slice_time_bounds():
    ts = TimeSeries(values=np.arange(10.0))
    part = ts.slice_time(2, 5)
    assert part.n_steps == 3
    np.testing.assert_array_equal(part.values[0], [2.0, 3.0, 4.0])
    with pytest.raises(ValueError):
        ts.slice_time(5, 5)
    with pytest.raises(ValueError):
        ts.slice_time(0, 11)


def test_fit_normalizer_population_std():
    stats = fit_normalizer(np.array([0.0, 2.0]))
    assert stats.mean[0] == 1.0
    assert stats.std[0] == 1.0  # population form, divisor T
    assert not stats.clamped[0]


def test_fit_normalizer_zero_variance_clamps():
    with pytest.warns(ZeroVarianceWarning):
        stats = fit_normalizer(np.full((2, 5), 7.0))
    assert np.all(stats.std == 1.0)
    assert np.all(stats.clamped)


def test_normalize_round_trip(rng):
    values = rng.normal(3.0, 2.5, size=(4, 100))
    stats = fit_normalizer(values)
    z = apply_normalizer(values, stats)
    np.testing.assert_allclose(z.mean(axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(z.std(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(invert_normalizer(z, stats), values, atol=1e-12)


def test_normalizer_returns_series_for_series_input():
    ts = TimeSeries(values=np.arange(8.0), name="x")
    stats = fit_normalizer(ts)
    z = apply_normalizer(ts, stats)
    assert isinstance(z, TimeSeries) and z.name == "x"
    back = invert_normalizer(z, stats)
    np.testing.assert_allclose(back.values, ts.values, atol=1e-12)


def test_normalizer_channel_mismatch():
    stats = fit_normalizer(np.arange(10.0).reshape(2, 5))
    with pytest.raises(ValueError, match="channel mismatch"):
        apply_normalizer(np.ones((3, 5)), stats)


def test_split_fraction_floors():
    ts = TimeSeries(values=np.arange(100.0))
    train, val, test = chronological_split(ts)
    assert (train.n_steps, val.n_steps, test.n_steps) == (70, 10, 20)

    ts10 = TimeSeries(values=np.arange(10.0))
    train, val, test = chronological_split(ts10)
    assert (train.n_steps, val.n_steps, test.n_steps) == (7, 1, 2)


def test_split_concatenates_back(rng):
    values = rng.normal(size=(3, 57))
    ts = TimeSeries(values=values)
    train, val, test = chronological_split(ts)
    rebuilt = np.concatenate([train.values, val.values, test.values], axis=1)
    np.testing.assert_array_equal(rebuilt, values)


def test_split_validation():
    with pytest.raises(ValueError):
        SplitSpec(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        SplitSpec(-0.1, 0.5, 0.6)
    ts = TimeSeries(values=np.arange(5.0))
    with pytest.raises(ValueError, match="empty segment"):
        chronological_split(ts)
    ts = TimeSeries(values=np.arange(100.0))
    with pytest.raises(ValueError, match="too short"):
        chronological_split(ts, min_window=15)


def test_window_anchors_worked_example():
    np.testing.assert_array_equal(window_anchors(5, 2, 1), [0, 1, 2])
    np.testing.assert_array_equal(window_anchors(5, 2, 1, stride=2), [0, 2])
    assert window_anchors(4, 3, 2).size == 0


def test_make_windows_contents(rng):
    values = rng.normal(size=(2, 30))
    windows = make_windows(values, history=5, horizon=3, stride=4)
    assert [w.t0 for w in windows] == [0, 4, 8, 12, 16, 20]
    for w in windows:
        np.testing.assert_array_equal(w.x, values[:, w.t0 : w.t0 + 5])
        np.testing.assert_array_equal(w.y, values[:, w.t0 + 5 : w.t0 + 8])


def test_make_windows_empty_behaviour():
    with pytest.raises(ValueError, match="cannot host"):
        make_windows(np.zeros((1, 4)), history=5, horizon=3)
    assert make_windows(np.zeros((1, 4)), 5, 3, allow_empty=True) == []


def test_metrics():
    y = np.array([[1.0, 2.0], [3.0, 4.0]])
    y_hat = np.array([[1.0, 0.0], [3.0, 7.0]])
    assert mse(y, y_hat) == pytest.approx((4.0 + 9.0) / 4.0)
    assert mae(y, y_hat) == pytest.approx((2.0 + 3.0) / 4.0)
    with pytest.raises(ValueError):
        mse(np.zeros(3), np.zeros(4))
