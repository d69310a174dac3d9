import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cryoxy.errors import FormatError, ValidationError
from cryoxy.signal_core import (IQTrace, RealTrace, TimeGrid, concatenate, integrate_envelope,
                                make_time_grid, tone_amplitude, trace_from_csv, trace_to_csv)


@pytest.mark.parametrize("rate, duration, n", [(1e9, 22e-9, 22), (2e9, 11e-9, 22), (1e9, 22.5e-9, 23)])
def test_make_time_grid_sample_count(rate, duration, n):
    grid = make_time_grid(rate, duration)
    assert grid.n_samples == n
    assert grid.t0 == 0


@pytest.mark.parametrize("rate, duration", [(0, 1e-9), (1e9, 0), (-1, 1), (1e9, -1e-9)])
def test_make_time_grid_rejects_non_positive(rate, duration):
    with pytest.raises(ValidationError):
        make_time_grid(rate, duration)


def test_time_grid_invariants():
    with pytest.raises(ValidationError):
        TimeGrid(0, 10)
    with pytest.raises(ValidationError):
        TimeGrid(1e9, 0)
    g = TimeGrid(4e9, 5, t0=1e-9)
    assert np.array_equal(g.times(), 1e-9 + np.arange(5) / 4e9)
    assert np.array_equal(g.times(), g.times())


def test_trace_length_must_match_grid():
    with pytest.raises(ValidationError):
        RealTrace(TimeGrid(1e9, 3), [1.0, 2.0])
    with pytest.raises(ValidationError):
        IQTrace(TimeGrid(1e9, 2), [1.0, 2.0], [1.0])


def test_trace_samples_are_read_only():
    tr = RealTrace(TimeGrid(1e9, 2), [1.0, 2.0])
    with pytest.raises(ValueError):
        tr.samples[0] = 5.0


def _tone_grid(f=5.6e9, periods=10, per_period=64):
    return TimeGrid(f * per_period, periods * per_period)


def test_tone_amplitude_of_pure_cosine():
    g = _tone_grid()
    tr = RealTrace(g, 3 * np.cos(2 * np.pi * 5.6e9 * g.times()))
    assert abs(abs(tone_amplitude(tr, 5.6e9)) - 3.0) < 1e-9


def test_tone_amplitude_of_sine_has_quadrature_phase():
    g = _tone_grid()
    a = tone_amplitude(RealTrace(g, 3 * np.sin(2 * np.pi * 5.6e9 * g.times())), 5.6e9)
    assert abs(abs(a) - 3.0) < 1e-9
    assert abs(np.angle(a) + math.pi / 2) < 1e-6


def test_tone_amplitude_of_zero_trace():
    assert tone_amplitude(RealTrace(_tone_grid(), np.zeros(640)), 1e9) == 0


def test_tone_amplitude_rejects_nyquist_and_negative():
    g = TimeGrid(10e9, 100)
    tr = RealTrace(g, np.ones(100))
    for f in (5e9, 6e9, -1.0):
        with pytest.raises(ValidationError):
            tone_amplitude(tr, f)


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(0, 2 ** 32 - 1))
def test_tone_amplitude_is_linear(a, b, seed):
    rng = np.random.default_rng(seed)
    g = TimeGrid(50e9, 300)
    x, y = rng.normal(size=300), rng.normal(size=300)
    f = 5.6e9
    lhs = tone_amplitude(RealTrace(g, a * x + b * y), f)
    rhs = a * tone_amplitude(RealTrace(g, x), f) + b * tone_amplitude(RealTrace(g, y), f)
    scale = max(abs(a) * abs(tone_amplitude(RealTrace(g, x), f)),
                abs(b) * abs(tone_amplitude(RealTrace(g, y), f)), 1e-300)
    assert abs(lhs - rhs) <= 1e-12 * scale + 1e-300


def test_integrate_raised_cosine():
    n = 22000
    g = TimeGrid(n / 22e-9, n)
    t = g.times()
    tr = RealTrace(g, (1 - np.cos(2 * np.pi * t / 22e-9)) / 2)
    assert abs(integrate_envelope(tr) - 11e-9) < 1e-11


def test_integrate_constant_exact():
    g = make_time_grid(1e9, 10e-9)
    assert integrate_envelope(RealTrace(g, np.full(g.n_samples, 2.0))) == 2e-8


def test_integrate_triangle():
    n, tau = 2200, 22e-9
    g = TimeGrid(n / tau, n)
    t = g.times() + g.dt / 2
    tri = 1 - np.abs(2 * t / tau - 1)
    assert abs(integrate_envelope(RealTrace(g, tri)) - tau / 2) < 1e-3 * tau


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=40),
       st.lists(st.integers(-1000, 1000), min_size=1, max_size=40))
def test_integrate_concatenation_is_additive(xs, ys):
    # dyadic samples keep every partial sum exact
    g = lambda n: TimeGrid(2.0 ** 30, n)
    a = RealTrace(g(len(xs)), np.array(xs) / 8.0)
    b = RealTrace(g(len(ys)), np.array(ys) / 8.0)
    assert integrate_envelope(concatenate(a, b)) == integrate_envelope(a) + integrate_envelope(b)


def test_concatenate_requires_common_rate():
    with pytest.raises(ValidationError):
        concatenate(RealTrace(TimeGrid(1e9, 1), [1.0]), RealTrace(TimeGrid(2e9, 1), [1.0]))


def test_probe_is_deterministic():
    rng = np.random.default_rng(3)
    tr = RealTrace(TimeGrid(50e9, 500), rng.normal(size=500))
    assert tone_amplitude(tr, 5.6e9) == tone_amplitude(tr, 5.6e9)
    assert integrate_envelope(tr) == integrate_envelope(tr)


def test_csv_round_trip_real_and_iq():
    rng = np.random.default_rng(0)
    real = RealTrace(TimeGrid(1e9, 22, t0=5e-9), rng.normal(size=22))
    text = trace_to_csv(real)
    assert text.startswith("# sample_rate=1000000000\n")
    back = trace_from_csv(text)
    assert back.grid == real.grid
    assert np.allclose(back.samples, real.samples, rtol=1e-11, atol=0)

    iq = IQTrace(TimeGrid(1e9, 3), [1.0, 0.5, 0.25], [0.0, -1.0, 2.0])
    lines = trace_to_csv(iq).splitlines()
    assert lines[1:] == ["1,0", "0.5,-1", "0.25,2"]
    assert trace_from_csv(trace_to_csv(iq)) == iq


def test_csv_twelve_significant_digits():
    tr = RealTrace(TimeGrid(1e9, 1), [1 / 3])
    assert trace_to_csv(tr).splitlines()[1] == "0.333333333333"


def test_csv_rejects_malformed():
    with pytest.raises(FormatError):
        trace_from_csv("1\n2\n")
    with pytest.raises(FormatError):
        trace_from_csv("# sample_rate=1e9\n1\n2,3\n")
