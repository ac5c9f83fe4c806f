import json

import numpy as np
import pytest

from passive_lsm import io, render
from passive_lsm.geometry import make_shape, sampling_grid


def test_bundle_roundtrip_little_endian(tmp_path):
    rng = np.random.default_rng(0)
    arrays = {"active": rng.normal(size=(5, 3, 3)), "matrix": rng.normal(size=(4, 6))}
    io.write_bundle(tmp_path, arrays, {"x": 1}, "dataset")
    raw = (tmp_path / "active.f64").read_bytes()
    np.testing.assert_array_equal(np.frombuffer(raw, dtype="<f8").reshape(5, 3, 3),
                                  arrays["active"])
    back, man = io.read_bundle(tmp_path, "dataset")
    for k in arrays:
        np.testing.assert_array_equal(back[k], arrays[k])
    assert man["arrays"]["active"]["axes"] == ["lag", "receiver", "test_point"]
    assert man["meta"] == {"x": 1}
    assert io.bundle_is_valid(tmp_path, {"x": 1})
    assert not io.bundle_is_valid(tmp_path, {"x": 2})


def test_bundle_bytes_deterministic(tmp_path):
    arr = {"map": np.arange(12.0).reshape(3, 4)}
    io.write_bundle(tmp_path / "a", arr, {"h": "abc"}, "map")
    io.write_bundle(tmp_path / "b", arr, {"h": "abc"}, "map")
    for name in ("map.f64", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_corruption_detected(tmp_path):
    io.write_bundle(tmp_path, {"map": np.ones(4)}, {}, "map")
    with open(tmp_path / "map.f64", "r+b") as fh:
        fh.write(b"\xff")
    assert not io.bundle_is_valid(tmp_path)
    with pytest.raises(io.ManifestError):
        io.read_bundle(tmp_path)


def test_wrong_kind_and_missing(tmp_path):
    io.write_bundle(tmp_path, {"map": np.ones(4)}, {}, "map")
    with pytest.raises(io.ManifestError):
        io.read_bundle(tmp_path, "operator")
    with pytest.raises(io.ManifestError):
        io.read_manifest(tmp_path / "nothing")
    with pytest.raises(io.ManifestError):
        io.read_array(tmp_path, "kernel")


def test_update_manifest(tmp_path):
    io.write_bundle(tmp_path, {"map": np.ones(2)}, {"a": 1}, "map")
    io.update_manifest(tmp_path, summary={"b": 2})
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["meta"] == {"a": 1, "summary": {"b": 2}}


def _map():
    g = sampling_grid(spacing=0.2)
    vals = np.where(g.mask, np.hypot(*(g.points - 1.0).transpose(2, 0, 1)) + 0.1, 0.0)
    return g, vals


def test_heatmap_quantization():
    g, vals = _map()
    img = render.heatmap(vals, g)
    vmax = vals[g.mask].max()
    expect = np.where(g.mask, np.rint(255 * vals / vmax), 0).astype(np.uint8)[::-1]
    np.testing.assert_array_equal(img.pixels, expect)
    assert img.width == len(g.xs) and img.height == len(g.ys)
    # world (x0, y_top) sits at pixel (0, 0)
    np.testing.assert_allclose(img.world_to_pixel([g.xs[0], g.ys[-1]]), [[0, 0]], atol=1e-12)
    np.testing.assert_allclose(img.world_to_pixel([g.xs[-1], g.ys[0]]),
                               [[img.height - 1, img.width - 1]], atol=1e-9)


def test_pgm_roundtrip(tmp_path):
    g, vals = _map()
    img = render.heatmap(vals, g)
    render.write_pgm(tmp_path / "m.pgm", img)
    data = (tmp_path / "m.pgm").read_bytes()
    assert data.startswith(f"P5\n{img.width} {img.height}\n255\n".encode())
    np.testing.assert_array_equal(render.read_pgm(data), img.pixels)


def test_overlay_only_when_burned():
    g, vals = _map()
    ell = make_shape("ellipse").polygon(256)
    img = render.heatmap(vals, g, overlay=[ell])
    assert np.array_equal(render.read_pgm(img.to_pgm()), img.pixels)
    burned = render.read_pgm(img.to_pgm(burn_overlay=True))
    changed = burned != img.pixels
    assert changed.any() and np.all(burned[changed] == 255)


def test_csv(tmp_path):
    g, vals = _map()
    render.write_csv(tmp_path / "m.csv", vals, g)
    assert (tmp_path / "m.csv").read_text().splitlines()[0] == "x,y,value"
    rows = render.read_csv(tmp_path / "m.csv")
    assert len(rows) == g.mask.sum()
    pts = g.points[g.mask]
    np.testing.assert_array_equal(rows[:, :2], pts)
    np.testing.assert_array_equal(rows[:, 2], vals[g.mask])
