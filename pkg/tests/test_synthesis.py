import numpy as np
import pytest

from oracles import causal_green_convolution
from passive_lsm.geometry import build_scene, draw_sources, make_shape
from passive_lsm.pulse import Pulse, autocorrelate
from passive_lsm.synthesis import (PulsedFieldSet, TimeGrid, add_noise, frequency_responses,
                                   incident_correlation, incident_spectrum, plan_frequencies,
                                   synthesize, synthesize_field)

P = Pulse()
TG = TimeGrid(0.1, 200)


def free_record(plan, r, times, kind="chi"):
    g = incident_spectrum(plan, np.array([[r, 0.0]]), np.array([[0.0, 0.0]]))
    return synthesize(g, plan, times, kind)[:, 0, 0]


def test_time_grid():
    assert TG.T == 40.0
    assert TG.record_times.size == 401 and TG.record_times[-1] == pytest.approx(40.0)
    np.testing.assert_allclose(TG.lag_times[[0, 200, 400]], [-40.0, 0.0, 40.0])
    with pytest.raises(ValueError):
        TimeGrid(0.0, 10)


def test_plan_spacing_and_padding():
    plan = plan_frequencies(P, TG, t_pad=80.0)
    assert plan.dk == pytest.approx(2 * np.pi / 80)
    np.testing.assert_allclose(np.diff(plan.k), plan.dk)
    assert plan.k[0] == pytest.approx(plan.dk / 2)
    assert plan_frequencies(P, TG).t_pad == 4 * TG.T
    with pytest.raises(ValueError):
        plan_frequencies(P, TG, t_pad=60.0)


def test_plan_band_matches_closed_form_threshold():
    plan = plan_frequencies(P, TG)
    dk = plan.dk
    k_all = dk * (np.arange(int(np.ceil(40 / dk))) + 0.5)
    mag = np.abs(P.spectrum_exact(k_all))
    expected = k_all[mag >= 1e-6 * mag.max()]
    np.testing.assert_allclose(plan.k, expected)
    assert plan.dropped_energy < 1e-10


@pytest.mark.xfail(strict=True, reason="the 1e-6 band of this pulse reaches k = 0 and k ~ 13.4")
def test_plan_band_inside_half_to_nine():
    plan = plan_frequencies(P, TG)
    assert plan.k.min() >= 0.5 - plan.dk and plan.k.max() <= 9.0 + plan.dk


@pytest.mark.parametrize("r", [1.0, 2.5, 5.0])
def test_free_space_pulse_against_time_domain_oracle(r):
    plan = plan_frequencies(P, TG)
    t = TG.record_times[::4]
    u = free_record(plan, r, t)
    ref = causal_green_convolution(P, t, r, support=0.0)
    assert np.abs(u - ref).max() < 2e-3 * np.abs(ref).max()
    # arrival after the travel time, peak near r + 3 (pulse centre)
    t_fine = TG.record_times
    u_fine = free_record(plan, r, t_fine)
    assert abs(t_fine[np.argmax(np.abs(u_fine))] - (r + 3)) <= TG.dt + 1e-9
    # nothing arrives before the travel time beyond the wrap-around level
    assert np.abs(u_fine[t_fine < r]).max() < 2e-3 * np.abs(u_fine).max()


def test_wraparound_error_decays_with_padding():
    t = TG.record_times
    u1 = free_record(plan_frequencies(P, TG, 4 * TG.T), 2.5, t)
    u2 = free_record(plan_frequencies(P, TG, 8 * TG.T), 2.5, t)
    u3 = free_record(plan_frequencies(P, TG, 16 * TG.T), 2.5, t)
    d1 = np.abs(u1 - u2).max() / np.abs(u2).max()
    d2 = np.abs(u2 - u3).max() / np.abs(u3).max()
    assert d1 < 1e-3
    assert 0.4 < d2 / d1 < 0.6  # first-order decay from the 1/t tail


@pytest.mark.xfail(strict=True, reason="the planar 1/t tail of a nonzero-mean pulse limits "
                   "wrap-around control to first order in 1/t_pad")
def test_doubling_padding_changes_below_1e6():
    t = TG.record_times
    u1 = free_record(plan_frequencies(P, TG, 4 * TG.T), 2.5, t)
    u2 = free_record(plan_frequencies(P, TG, 8 * TG.T), 2.5, t)
    assert np.abs(u1 - u2).max() < 1e-6 * np.abs(u2).max()


def test_incident_correlation_against_oracle_and_symmetry():
    ac = autocorrelate(P)
    plan = plan_frequencies(P, TG, 16 * TG.T)
    rx = np.array([[1.0, 0.0], [0.0, 2.5], [3.0, 4.0]])
    tx = np.array([[0.0, 0.0], [0.0, 0.1]])
    lags = TG.lag_times[::5]
    phi = incident_correlation(plan, rx, tx, lags).values
    for j, p in enumerate(rx):
        r = np.hypot(*(p - tx[0]))
        ref = causal_green_convolution(ac, lags, r, support=6.0)
        assert np.abs(phi[:, j, 0] - ref).max() < 1e-4 * np.abs(ref).max()
    swap = incident_correlation(plan, tx, rx, lags).values
    np.testing.assert_allclose(phi, swap.transpose(0, 2, 1), atol=1e-12 * np.abs(phi).max())
    with pytest.raises(ValueError):
        incident_correlation(plan, tx, tx, lags)


def test_incident_correlation_decays_with_distance():
    plan = plan_frequencies(P, TG)
    src = np.array([[0.0, 0.0]])
    amps = [np.abs(incident_correlation(plan, np.array([[d, 0.0]]), src, TG.lag_times).values).max()
            for d in (1.0, 2.0, 4.0)]
    assert amps[0] > amps[1] > amps[2]


@pytest.fixture(scope="module")
def ellipse_responses():
    scene = build_scene([make_shape("ellipse")])
    plan = plan_frequencies(P, TimeGrid(0.1, 50))
    pts = scene.receivers[:4]
    src = draw_sources(6, 20.0, 0.5, seed=2).points
    return scene, plan, pts, src


def test_thread_count_does_not_change_results(ellipse_responses):
    scene, plan, pts, src = ellipse_responses
    a = frequency_responses(scene, plan, pts, src, 64, threads=1)
    b = frequency_responses(scene, plan, pts, src, 64, threads=3)
    assert a.total.tobytes() == b.total.tobytes()
    assert a.scattered.tobytes() == b.scattered.tobytes()


def test_scattered_chitilde_bounded(ellipse_responses):
    scene, plan, _, _ = ellipse_responses
    fd = frequency_responses(scene, plan, scene.receivers, scene.sources, 64,
                             want=("scattered",), check_residual=True)
    lags = TimeGrid(0.1, 50).lag_times
    act = synthesize_field(fd, lags, "chitilde", "scattered")
    inc = incident_correlation(plan, scene.receivers, scene.sources, lags).values
    assert np.all(np.isfinite(act.values))
    assert np.abs(act.values).max() < 10 * np.abs(inc).max()
    assert fd.max_residual < 1e-6
    with pytest.raises(ValueError):
        synthesize_field(fd, lags, "chi", "total")


def test_receiver_inside_obstacle_rejected(ellipse_responses):
    scene, plan, _, src = ellipse_responses
    with pytest.raises(ValueError):
        frequency_responses(scene, plan, np.array([[1.0, 1.0]]), src)


def test_noise_identity_and_bound():
    u = np.random.default_rng(0).normal(size=(41, 3, 5))
    u[3, 1, :] = 0.0
    np.testing.assert_array_equal(add_noise(u, 0.0, seed=1), u)
    v = add_noise(u, 0.05, seed=1)
    assert np.all(np.abs(v - u) <= 0.05 * np.abs(u))
    assert np.abs(v - u).max() <= 0.05 * np.abs(u).max()
    assert np.all(v[3, 1] == 0)
    np.testing.assert_array_equal(v, add_noise(u, 0.05, seed=1))
    assert not np.array_equal(v, add_noise(u, 0.05, seed=2))
    with pytest.raises(ValueError):
        add_noise(u, -0.1)


def test_noise_on_field_set():
    fs = PulsedFieldSet(values=np.ones((5, 2, 2)), times=np.arange(5.0), pulse_kind="chi",
                        field_kind="total")
    noisy = add_noise(fs, 0.05, seed=4)
    assert isinstance(noisy, PulsedFieldSet)
    assert noisy.noise == 0.05 and noisy.seed == 4
    assert np.all(np.abs(noisy.values - 1) <= 0.05)
