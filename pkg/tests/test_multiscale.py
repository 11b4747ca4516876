"""Filter cascade, downsampling, length laws, and interpolation."""

import numpy as np
import pytest

from ldmts.multiscale import (
    DETAIL,
    TREND,
    ScaleSet,
    avgpool_downsample,
    cascade_steps,
    component_lengths,
    component_rates,
    decompose,
    interpolation_matrix,
    linear_interpolate,
    moving_average,
    parse_eta,
    reconstruct_level,
)
from ldmts.series import TimeSeries


def test_parse_eta():
    assert parse_eta("1/16") == pytest.approx(0.0625)
    assert parse_eta(1) == 1.0
    assert parse_eta("0.25") == 0.25
    for bad in (0, -0.5, 1.5, "0", "2/1"):
        with pytest.raises(ValueError, match=r"\(0, 1\]"):
            parse_eta(bad)
    with pytest.raises(ValueError):
        parse_eta("abc")


def test_scale_set_invariants():
    assert ScaleSet((24, 168)).n_levels == 2
    assert ScaleSet((2,)).scales == (2,)
    with pytest.raises(ValueError, match="even"):
        ScaleSet((3, 6))
    with pytest.raises(ValueError, match="even|>= 2"):
        ScaleSet((1, 2))
    with pytest.raises(ValueError, match="increasing"):
        ScaleSet((24, 24))
    with pytest.raises(ValueError, match="multiple"):
        ScaleSet((4, 6))
    with pytest.raises(ValueError):
        ScaleSet(())
    assert ScaleSet((24, 168)).min_input_length() == 336


def test_moving_average_alternating_interior_zero():
    # window-length span of a period-2 signal is annihilated away from edges
    x = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
    out = moving_average(x, 2)
    np.testing.assert_allclose(out[1:-1], 0.0, atol=1e-15)


def test_moving_average_constant_and_ramp():
    const = moving_average(np.full(50, 3.25), 24)
    np.testing.assert_allclose(const, 3.25, atol=1e-12)
    # symmetric taps reproduce a linear ramp exactly away from the edges
    ramp = np.arange(60.0)
    out = moving_average(ramp, 8)
    np.testing.assert_allclose(out[4:-4], ramp[4:-4], atol=1e-10)


def test_moving_average_validation():
    with pytest.raises(ValueError, match="even"):
        moving_average(np.arange(10.0), 3)
    with pytest.raises(ValueError):
        moving_average(np.arange(10.0), 0)


def test_moving_average_multichannel_matches_rows(rng):
    x = rng.normal(size=(3, 40))
    out = moving_average(x, 4)
    for i in range(3):
        np.testing.assert_allclose(out[i], moving_average(x[i], 4), atol=1e-15)


def test_avgpool_worked_examples():
    np.testing.assert_allclose(avgpool_downsample([1.0, 2.0, 3.0, 4.0], 2), [1.5, 3.5])
    # remainder trimmed from the front, most recent samples kept
    np.testing.assert_allclose(avgpool_downsample([9.0, 1.0, 2.0, 3.0, 4.0], 2), [1.5, 3.5])
    np.testing.assert_allclose(avgpool_downsample([5.0, 6.0], 1), [5.0, 6.0])
    with pytest.raises(ValueError, match="shorter than pool"):
        avgpool_downsample([1.0], 2)


def test_cascade_windows_and_rates():
    x = np.sin(np.arange(1680.0))
    steps = cascade_steps(x, ScaleSet((24, 168)))
    assert [s.level for s in steps] == [0, 1, 2]
    assert [s.rate for s in steps] == [1, 12, 84]
    assert [s.window for s in steps] == [24, 14, 0]
    assert steps[0].approximation.shape[-1] == 1680
    assert steps[1].approximation.shape[-1] == 140
    assert steps[2].approximation.shape[-1] == 20


def test_cascade_residual_identity(rng):
    x = rng.normal(size=(2, 700))
    for step in cascade_steps(x, ScaleSet((4, 8, 16)))[:-1]:
        np.testing.assert_allclose(
            step.approximation, reconstruct_level(step.smoothed, step.detail), atol=1e-12
        )


def test_cascade_rejects_short_input():
    with pytest.raises(ValueError, match="too short"):
        cascade_steps(np.zeros(100), ScaleSet((24, 168)))


def test_decompose_structure():
    x = np.cos(np.arange(32.0) / 3)
    d = decompose(x, ScaleSet((4, 8)))
    assert [c.kept_length for c in d.components] == [32, 16, 8]
    assert [c.rate for c in d.components] == [1, 2, 4]
    assert [c.kind for c in d.components] == [DETAIL, DETAIL, TREND]
    # each component is tagged with the scale of the window that produced it
    assert [c.scale for c in d.components] == [4, 8, 8]
    assert d.source_length == 32
    assert d.level(2).kind == TREND


def test_decompose_reference_lengths():
    x = np.sin(np.arange(1680.0) / 5)
    d = decompose(x, ScaleSet((24, 168)))
    assert [c.kept_length for c in d.components] == [1680, 140, 20]
    assert [c.scale for c in d.components] == [24, 168, 168]


def test_decompose_rejects_downsampled_series():
    ts = TimeSeries(values=np.zeros(700), rate=4)
    with pytest.raises(ValueError, match="rate 1"):
        decompose(ts, ScaleSet((4,)))


def test_decompose_propagates_channel_names():
    ts = TimeSeries(values=np.zeros((2, 64)), channel_names=("u", "v"), name="sig")
    d = decompose(ts, ScaleSet((4, 8)))
    assert d.components[0].series.channel_names == ("u", "v")
    assert "detail0" in d.components[0].series.name


def test_component_length_law_matches_decompose(rng):
    # the closed-form law must agree with the actual cascade output
    for _ in range(25):
        base = int(rng.integers(1, 4)) * 2
        scales = [base]
        for _ in range(int(rng.integers(0, 3))):
            scales.append(scales[-1] * int(rng.integers(2, 5)))
        ss = ScaleSet(tuple(scales))
        length = int(rng.integers(ss.min_input_length(), 3000))
        d = decompose(rng.normal(size=length), ss)
        law = component_lengths(length, ss.scales)
        assert [c.kept_length for c in d.components] == law
        assert [c.rate for c in d.components] == component_rates(ss.scales)


def test_component_length_law_table_rows():
    cases = {
        ((24, 168), 336): [336, 28, 4],
        ((24, 168), 1680): [1680, 140, 20],
        ((24, 168), 512): [512, 42, 6],
        ((4, 96), 336): [336, 168, 7],
        ((4, 96), 960): [960, 480, 20],
        ((6, 144), 336): [336, 112, 4],
        ((6, 144), 1440): [1440, 480, 20],
    }
    for (scales, length), expected in cases.items():
        assert component_lengths(length, scales) == expected


def test_linear_interpolate_worked_example():
    np.testing.assert_allclose(
        linear_interpolate(np.array([2.0, 4.0]), 4),
        [2.0, 2.0 + 2.0 / 3.0, 3.0 + 1.0 / 3.0, 4.0],
    )


def test_linear_interpolate_identity_and_constant():
    x = np.array([1.0, 5.0, 2.0])
    np.testing.assert_array_equal(linear_interpolate(x, 3), x)
    np.testing.assert_array_equal(linear_interpolate(np.array([7.0]), 5), np.full(5, 7.0))


def test_linear_interpolate_endpoints(rng):
    for _ in range(20):
        n = int(rng.integers(2, 40))
        m = int(rng.integers(2, 40))
        x = rng.normal(size=n)
        out = linear_interpolate(x, m)
        assert out[0] == pytest.approx(x[0], abs=1e-12)
        assert out[-1] == pytest.approx(x[-1], abs=1e-12)


def test_linear_interpolate_batch_axis(rng):
    x = rng.normal(size=(3, 2, 7))
    out = linear_interpolate(x, 13)
    assert out.shape == (3, 2, 13)
    np.testing.assert_allclose(out[1, 0], linear_interpolate(x[1, 0], 13), atol=1e-15)


def test_interpolation_matrix_matches_function(rng):
    for _ in range(20):
        n = int(rng.integers(1, 30))
        m = int(rng.integers(1, 30))
        x = rng.normal(size=(4, n))
        a = interpolation_matrix(n, m)
        assert a.shape == (m, n)
        np.testing.assert_allclose(x @ a.T, linear_interpolate(x, m), atol=1e-12)
        np.testing.assert_allclose(a.sum(axis=1), 1.0, atol=1e-12)
