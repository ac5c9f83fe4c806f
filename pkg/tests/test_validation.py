import numpy as np
import pytest

from conftest import TIME_GRID
from passive_lsm.correlation import passive_kernel
from passive_lsm.geometry import build_scene, make_shape
from passive_lsm.pulse import Pulse
from passive_lsm.synthesis import TimeGrid
from passive_lsm.validation import (IdentityReport, baseline_limit, check_hk_free,
                                    check_hk_time, check_hk_total, compare_kernel,
                                    decay_is_monotone, load_baselines, relative_error,
                                    standard_pair)

P, Q = standard_pair()


def test_relative_error_floor():
    assert relative_error(0.0, 1e-20) == pytest.approx(1e-6)
    assert relative_error(2.0, 1.0) == 0.5


def test_coincident_points_limit():
    rep = check_hk_free(4.0, P, P, 80.0, 512)
    assert rep.lhs == 0.5j
    assert abs(rep.rhs.real) < 1e-12
    assert rep.rhs.imag == pytest.approx(0.5, rel=1e-3)
    errs = [check_hk_free(4.0, P, P, R, 512).error for R in (10, 20, 40, 80)]
    assert decay_is_monotone([IdentityReport("HK-free", {}, 0, 0, e) for e in errs])


def test_free_decay_in_R():
    reps = [check_hk_free(4.0, P, Q, R, 512) for R in (10.0, 20.0, 40.0, 80.0)]
    assert decay_is_monotone(reps)


@pytest.mark.parametrize("k", [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])
@pytest.mark.parametrize("sep", [0.5, 1.0, 2.0])
def test_free_error_at_R20(k, sep):
    p, q = standard_pair(separation=sep)
    rep = check_hk_free(k, p, q, 20.0, 512, baseline_limit("hk_free_R20"))
    assert rep.error < 0.1
    assert rep.passed


def test_total_reduces_to_free_without_obstacle():
    a = check_hk_total(4.0, P, Q, build_scene([]), 20.0, 512)
    b = check_hk_free(4.0, P, Q, 20.0, 512)
    assert a.identity == "HK-total"
    assert a.error == b.error and a.lhs == b.lhs and a.rhs == b.rhs


@pytest.mark.parametrize("k", [2.0, 4.0, 6.0, 8.0])
def test_total_ellipse(k):
    scene = build_scene([make_shape("ellipse")])
    p, q = np.array([0.0, 2.2]), np.array([2.0, 2.2])
    rep = check_hk_total(k, p, q, scene, 20.0, 512, threshold=baseline_limit("hk_total_ellipse"))
    assert rep.passed
    assert rep.error < 0.15
    assert rep.extra["lhs_real_residue"] < 1e-12
    assert np.isfinite(rep.extra["scattered_error"])


def test_report_json_roundtrip():
    import json
    rep = check_hk_free(4.0, P, Q, 20.0, 64, threshold=1.0)
    d = json.loads(rep.to_json())
    assert d["identity"] == "HK-free" and d["passed"] is True
    assert d["params"]["p"] == list(P)
    assert len(d["lhs"]) == 2


def test_compare_kernel_shapes_and_free_mode():
    z = np.zeros((5, 2, 2))
    with pytest.raises(ValueError):
        compare_kernel(z, np.zeros((5, 2, 3)))
    with pytest.raises(ValueError):
        compare_kernel(z, z)
    rep = compare_kernel(z + 0.01, z, incident=np.ones((5, 2, 2)))
    assert rep.params["free_space"] and rep.error == pytest.approx(0.01)


def test_baseline_file():
    base = load_baselines()
    for key in ("hk_free_R20", "hk_total_ellipse", "hk_time_free", "hk_time_ellipse",
                "c_vs_i_frobenius"):
        assert base[key]["value"] > 0
        assert baseline_limit(key, base) == pytest.approx(base[key]["value"] * 1.1)


@pytest.mark.slow
def test_time_identity_free_space(simulated):
    scene, src, ds = simulated("free", 0.0, 80)
    assert np.all(ds.active == 0)
    rep = check_hk_time(scene, Pulse(), 20.0, 80, 0.0, 0, TIME_GRID, dataset=ds,
                        threshold=baseline_limit("hk_time_free"))
    assert rep.error < 0.1 and rep.passed


@pytest.mark.slow
def test_time_identity_ellipse_baseline(simulated):
    scene, src, ds = simulated("ellipse", 0.1, 80)
    rep = check_hk_time(scene, Pulse(), 20.0, 80, 0.1, 0, TIME_GRID, dataset=ds,
                        threshold=baseline_limit("hk_time_ellipse"))
    assert rep.passed


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="central difference over 4 dt at dt = 0.1 leaves a "
                   "relative error near 0.27; halving dt brings it to 0.07")
def test_time_identity_ellipse_below_quarter(simulated):
    scene, src, ds = simulated("ellipse", 0.1, 80)
    rep = check_hk_time(scene, Pulse(), 20.0, 80, 0.1, 0, TIME_GRID, dataset=ds)
    assert rep.error < 0.25


@pytest.mark.slow
def test_time_identity_error_is_discretization_limited():
    scene = build_scene([make_shape("ellipse")])
    rep = check_hk_time(scene, Pulse(), 20.0, 80, 0.1, 0, TimeGrid(0.05, 400))
    assert rep.error < 0.25


@pytest.mark.slow
def test_time_identity_improves_with_more_sources(simulated):
    errs = []
    for L in (80, 200):
        scene, src, ds = simulated("ellipse", 0.9, L)
        errs.append(check_hk_time(scene, Pulse(), 20.0, L, 0.9, 0, TIME_GRID, dataset=ds).error)
    assert errs[1] < errs[0]


@pytest.mark.slow
def test_free_space_kernel_insensitive_to_doubling_L(simulated):
    from passive_lsm.geometry import draw_sources
    from passive_lsm.synthesis import simulate
    scene, src, ds = simulated("free", 0.0, 80)
    ds2 = simulate(scene, Pulse(), TIME_GRID, draw_sources(160, 20.0, 0.0, 0), active=False)
    c1 = passive_kernel(ds.passive_x, ds.passive_y, ds.incident, 0.1, 20.0, 80).values
    c2 = passive_kernel(ds2.passive_x, ds2.passive_y, ds2.incident, 0.1, 20.0, 160).values
    assert np.linalg.norm(c2 - c1) < 0.01 * np.linalg.norm(c1)
