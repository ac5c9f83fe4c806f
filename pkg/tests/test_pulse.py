import numpy as np
import pytest
from scipy.integrate import simpson, trapezoid

from passive_lsm.pulse import Pulse, autocorrelate, fourier_transform, spectrum, time_reverse

P = Pulse()


def closed_form_autocorrelation(t, w=4.0, a=1.6, t0=3.0):
    # int sin(w s) sin(w (s - t)) exp(-a (s - t0)^2 - a (s - t - t0)^2) ds
    return 0.5 * np.sqrt(np.pi / (2 * a)) * np.exp(-a * t ** 2 / 2) * (
        np.cos(w * t) - np.cos(2 * w * t0) * np.exp(-w ** 2 / (2 * a)))


def test_pulse_values():
    assert P(3.0) == pytest.approx(np.sin(12.0), abs=1e-15)
    assert P(3.0) == pytest.approx(-0.536573, abs=1e-6)
    assert P(0.0) == 0.0
    assert P(3 + np.pi / 4) == pytest.approx(-np.sin(12) * np.exp(-np.pi ** 2 / 10), rel=1e-12)


def test_derivative_matches_finite_difference():
    t = np.linspace(0, 6, 601)
    h = 1e-5
    fd = (P(t + h) - P(t - h)) / (2 * h)
    d = P.derivative(t)
    assert np.abs(d - fd).max() / np.abs(d).max() < 1e-6


def test_negligible_outside_quadrature_interval():
    peak = np.abs(P(np.linspace(0, 6, 6001))).max()
    a, b = P.quad_interval
    outside = np.concatenate([np.linspace(a - 5, a, 200), np.linspace(b, b + 5, 200)])
    assert np.abs(P(outside)).max() < 1e-10 * peak


def test_transform_matches_closed_form():
    k = np.linspace(-15, 15, 301)
    np.testing.assert_allclose(fourier_transform(P, k), P.spectrum_exact(k), atol=1e-12)


def test_transform_at_zero_matches_trapezoid():
    t = np.arange(-1, 7 + 1e-12, 1e-4)
    ref = trapezoid(P(t), t)
    assert fourier_transform(P, 0.0)[0] == pytest.approx(ref, abs=1e-9)


def test_spectrum_hermitian_and_peak():
    k = np.linspace(0, 12, 1201)
    sp = spectrum(P, k)
    assert abs(sp.peak_k - 4.0) < 0.1
    neg = fourier_transform(P, -k)
    np.testing.assert_allclose(np.abs(neg), np.abs(sp.values), rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(neg, np.conj(sp.values), atol=1e-14)
    mag = np.abs(sp.values)
    outside = (k < sp.band[0]) | (k > sp.band[1])
    assert np.all(mag[outside] < 1e-6 * mag.max())


def test_autocorrelation_zero_lag_and_evenness():
    ac = autocorrelate(P)
    t = np.linspace(-1, 7, 160001)
    energy = simpson(P(t) ** 2, x=t)
    assert ac.energy == pytest.approx(energy, rel=1e-9)
    lags = np.linspace(0, 6, 601)
    assert np.abs(ac(lags) - ac(-lags)).max() <= 1e-12 * ac.energy
    assert ac(7.0) == 0.0 and ac(-6.5) == 0.0


def test_autocorrelation_closed_form():
    ac = autocorrelate(P)
    t = np.linspace(-6, 6, 1201)
    ref = closed_form_autocorrelation(t)
    assert np.abs(ac(t) - ref).max() < 1e-7 * ref.max()


def test_wiener_khinchin():
    ac = autocorrelate(P)
    k = np.linspace(0, 30, 30001)
    power = np.abs(P.spectrum_exact(k)) ** 2
    t = np.linspace(-5, 5, 101)
    inv = simpson(power[None, :] * np.cos(np.outer(t, k)), x=k, axis=1) / np.pi
    assert np.abs(inv - ac(t)).max() < 1e-6 * ac.energy


def test_autocorrelation_grid_errors():
    with pytest.raises(ValueError):
        autocorrelate(P, lag_grid=np.linspace(-2, 2, 101), T0=2.0)
    with pytest.raises(ValueError):
        autocorrelate(P, lag_grid=np.linspace(-3, 3, 101), T0=6.0)


def test_time_reverse_involution():
    g = np.random.default_rng(0).normal(size=41)
    np.testing.assert_array_equal(time_reverse(time_reverse(g)), g)
    np.testing.assert_array_equal(time_reverse(g), g[::-1])
