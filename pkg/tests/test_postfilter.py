import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lspie.errors import InvalidArgumentError
from lspie.postfilter import FilterSpec, apply_filter, design_butterworth, magnitude_response
from oracles import butterworth_gain


def amplitude(y, f):
    """Least-squares amplitude of the component at frequency ``f`` (cycles/sample)."""
    j = np.arange(y.size)
    B = np.column_stack([np.sin(2 * np.pi * f * j), np.cos(2 * np.pi * f * j)])
    coef, *_ = np.linalg.lstsq(B, y, rcond=None)
    return np.hypot(*coef)


def test_first_order_single_section():
    sos = design_butterworth(1, 0.1)
    assert sos.shape == (1, 6)
    assert magnitude_response(sos, [0.0])[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("order", [1, 2, 4, 8])
@pytest.mark.parametrize("cutoff", [0.02, 0.1, 0.3])
def test_response_matches_analytic_butterworth(order, cutoff):
    sos = design_butterworth(order, cutoff)
    f = np.linspace(0, 0.499, 200)
    np.testing.assert_allclose(magnitude_response(sos, f), butterworth_gain(f, cutoff, order),
                               atol=1e-9)
    assert magnitude_response(sos, [cutoff])[0] == pytest.approx(1 / np.sqrt(2), abs=1e-6)
    assert magnitude_response(sos, [0.0])[0] == pytest.approx(1.0, abs=1e-9)


def test_tenfold_cutoff_at_nyquist_is_blocked():
    sos = design_butterworth(4, 0.05)
    assert magnitude_response(sos, [0.5])[0] <= 1.1e-4


def test_tenfold_cutoff_attenuation_below_nyquist():
    sos = design_butterworth(4, 0.04)
    expected = butterworth_gain(0.4, 0.04, 4)
    assert magnitude_response(sos, [0.4])[0] == pytest.approx(expected, rel=1e-6)
    assert expected <= 1e-4


def test_monotone_magnitude():
    sos = design_butterworth(6, 0.12)
    h = magnitude_response(sos, np.linspace(0, 0.5, 2001))
    assert np.all(np.diff(h) <= 1e-15)


@pytest.mark.parametrize("kw", [dict(order=0), dict(order=9), dict(cutoff=0.0),
                                dict(cutoff=0.5), dict(mode="acausal")])
def test_filter_spec_validation(kw):
    with pytest.raises(InvalidArgumentError):
        FilterSpec(**kw)


def test_constant_and_zero_inputs():
    spec = FilterSpec(4, 0.1)
    np.testing.assert_allclose(apply_filter(np.full(100, 3.7), spec), 3.7, atol=1e-9)
    np.testing.assert_array_equal(apply_filter(np.zeros(100), spec), 0.0)


def test_too_short():
    with pytest.raises(InvalidArgumentError):
        apply_filter(np.ones(12), FilterSpec(4, 0.1))


def test_two_tone_separation():
    cutoff = 0.04
    j = np.arange(4000)
    lo, hi = 0.2 * cutoff, 10 * cutoff
    y = apply_filter(np.sin(2 * np.pi * lo * j) + np.sin(2 * np.pi * hi * j), FilterSpec(4, cutoff))
    core = slice(500, 3500)
    assert amplitude(y[core], lo) == pytest.approx(1.0, rel=0.02)
    assert amplitude(y[core], hi) <= 1e-3


def test_zero_phase_lag():
    j = np.arange(2000)
    x = np.sin(2 * np.pi * 0.01 * j)
    y = apply_filter(x, FilterSpec(4, 0.05))
    lags = np.arange(-30, 31)
    xc = [np.dot(x[200:1800], y[200 + L:1800 + L]) for L in lags]
    assert lags[int(np.argmax(xc))] == 0


def test_causal_mode_lags():
    j = np.arange(2000)
    x = np.sin(2 * np.pi * 0.01 * j)
    y = apply_filter(x, FilterSpec(4, 0.05, mode="causal"))
    lags = np.arange(0, 40)
    xc = [np.dot(x[200:1800], y[200 + L:1800 + L]) for L in lags]
    assert lags[int(np.argmax(xc))] > 0


@settings(max_examples=50, deadline=None)
@given(a=st.floats(-10, 10), b=st.floats(-10, 10), seed=st.integers(0, 2 ** 16))
def test_linearity(a, b, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=(2, 128))
    spec = FilterSpec(3, 0.15)
    lhs = apply_filter(a * x + b * y, spec)
    rhs = a * apply_filter(x, spec) + b * apply_filter(y, spec)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)
