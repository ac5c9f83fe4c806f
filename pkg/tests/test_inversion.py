import numpy as np
import pytest

from passive_lsm.geometry import SamplingGrid, build_scene, make_shape, sampling_grid
from passive_lsm.inversion import (IndicatorMap, contrast_ratio, indicator_map, indicator_values,
                                   level_set_components, map_summary, solve_sample,
                                   truncated_svd)
from passive_lsm.operators import ImagingOperator
from passive_lsm.pulse import Pulse, autocorrelate


def test_ratio_truncation():
    assert truncated_svd(np.diag([1.0, 0.01, 0.001]), 0.005).P == 2
    svd = truncated_svd(np.eye(7))
    assert svd.P == 7 and np.allclose(svd.s, 1.0)
    with pytest.raises(ValueError):
        truncated_svd(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        truncated_svd(np.eye(3), ratio=0.0)


def test_eckart_young():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(200, 200)) @ np.diag(np.logspace(0, -4, 200))
    svd = truncated_svd(A, 0.005)
    s_full = np.linalg.svd(A, compute_uv=False)
    approx = svd.U @ np.diag(svd.s) @ svd.Vt
    err = np.linalg.norm(approx - A, 2)
    assert err <= s_full[svd.P] * (1 + 1e-10)
    np.testing.assert_allclose(svd.s_all, s_full, rtol=1e-10)


def test_identity_solution():
    phi = np.random.default_rng(1).normal(size=12)
    sol = solve_sample(truncated_svd(np.eye(12)), phi)
    np.testing.assert_allclose(sol.g, phi, atol=1e-14)
    assert sol.indicator == pytest.approx(1 / np.linalg.norm(phi), rel=1e-13)


def test_first_singular_vector():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(30, 30))
    svd = truncated_svd(A)
    sol = solve_sample(svd, svd.s[0] * svd.U[:, 0])
    np.testing.assert_allclose(sol.g, svd.Vt[0], atol=1e-12)
    assert sol.indicator == pytest.approx(1.0, abs=1e-12)


def test_degenerate_and_shape_errors():
    svd = truncated_svd(np.diag([1.0, 0.0]))
    sol = solve_sample(svd, np.array([0.0, 1.0]))
    assert sol.degenerate and np.isinf(sol.indicator)
    with pytest.raises(ValueError):
        solve_sample(svd, np.ones(3))


@pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
def test_scaling(alpha):
    rng = np.random.default_rng(3)
    A = rng.normal(size=(40, 40))
    phi = rng.normal(size=40)
    op = ImagingOperator(A, "N", 0, 40, 40, 0.1, 1.0)
    a, b = truncated_svd(op), truncated_svd(op.scaled(alpha))
    assert a.P == b.P
    sa, sb = solve_sample(a, phi), solve_sample(b, phi)
    np.testing.assert_allclose(sb.g, sa.g / alpha, rtol=1e-12, atol=1e-15)
    assert sb.indicator == pytest.approx(alpha * sa.indicator, rel=1e-12)


def test_batched_matches_single():
    sc = build_scene([make_shape("ellipse")])
    ac = autocorrelate(Pulse())
    lags = 0.2 * np.arange(-10, 11)
    rng = np.random.default_rng(4)
    A = rng.normal(size=(21 * 15, 21 * 15))
    svd = truncated_svd(A)
    pts = np.array([[0.5, 0.5], [1.0, 1.0], [2.0, 1.5]])
    vals = indicator_values(svd, pts, 0.0, ac, sc.receivers, lags, chunk=2)
    from passive_lsm.operators import test_function
    for p, v in zip(pts, vals):
        tf = test_function(p, 0.0, ac, sc.receivers, lags)
        assert v == pytest.approx(solve_sample(svd, tf.flat).indicator, rel=1e-12)


def test_all_masked_grid_gives_zero_map():
    g = SamplingGrid(xs=np.array([5.0, 5.1]), ys=np.array([5.0, 5.1]), spacing=0.1,
                     center=(0.0, 0.0), radius=0.5)
    assert not g.mask.any()
    m = indicator_map(truncated_svd(np.eye(3)), g, 0.0, None, None, None)
    assert np.all(m.values == 0) and m.max_value == 0


def _synthetic_map():
    g = sampling_grid(spacing=0.1)
    pts = g.points
    d1 = np.hypot(*(pts - [0.25, 1.75]).transpose(2, 0, 1))
    d2 = np.hypot(*(pts - [1.75, 0.25]).transpose(2, 0, 1))
    vals = np.exp(-d1 ** 2 / 0.05) + 0.8 * np.exp(-d2 ** 2 / 0.03) + 0.01
    vals[~g.mask] = 0
    return IndicatorMap(vals, g, "N", float(vals.max())), g


def test_level_set_components_and_summary():
    m, g = _synthetic_map()
    labels, n = level_set_components(m, 0.5)
    assert n == 2
    sc = build_scene([make_shape("disk", center=(0.25, 1.75), radius=1 / 3),
                      make_shape("disk", center=(1.75, 0.25), radius=0.2)])
    s = map_summary(m, sc)
    assert s["argmax_inside"]
    assert s["contrast"] > 10
    np.testing.assert_allclose(s["argmax"], [0.25, 1.75], atol=0.05 + 1e-9)


def test_contrast_ratio_nan_without_regions():
    sc = build_scene([])
    assert np.isnan(contrast_ratio(np.ones(3), np.zeros((3, 2)), sc))
