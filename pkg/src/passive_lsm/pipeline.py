"""Stage functions behind the command line: simulate, assemble, invert, render.

Every stage writes one directory whose manifest carries the hash of the
configuration subset it depends on. ``run_pipeline`` reuses a stage when its
directory already holds a manifest with the same hash and intact arrays.
"""
from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from . import io, render
from .config import RunConfig
from .correlation import passive_kernel
from .geometry import build_scene, draw_sources, sampling_grid
from .inversion import indicator_map, map_summary, truncated_svd
from .operators import ImagingOperator, assemble_operator, default_dy
from .pulse import Pulse, autocorrelate
from .synthesis import TimeGrid, add_noise, simulate

log = logging.getLogger(__name__)

# fixed sub-streams of the run seed for the three noisy arrays
NOISE_STREAMS = {"passive_x": 1, "passive_y": 2, "active": 3}


class StageError(RuntimeError):
    def __init__(self, stage, cause):
        super().__init__(f"{stage} failed: {cause}")
        self.stage = stage


def scene_of(cfg: RunConfig):
    s = cfg.scene
    return build_scene(s.obstacles, s.center, s.radii, s.n_points, s.aperture,
                       s.sampling_center, s.sampling_radius)


def pulse_of(cfg: RunConfig) -> Pulse:
    return Pulse(omega=cfg.pulse.omega, alpha=cfg.pulse.alpha, t0=cfg.pulse.t0)


def time_grid_of(cfg: RunConfig) -> TimeGrid:
    return TimeGrid(cfg.time.dt, cfg.time.N)


def grid_of(cfg: RunConfig):
    return sampling_grid(cfg.scene.sampling_center, cfg.scene.sampling_radius, cfg.grid.spacing)


def noise_seed(cfg: RunConfig, name: str):
    return [int(cfg.seed), NOISE_STREAMS[name]]


def stage_dir(cfg: RunConfig, stage: str, root=None) -> Path:
    root = Path(root or cfg.output)
    tag = {"simulate": "dataset", "assemble": f"operator-{cfg.operator.kind}",
           "invert": f"map-{cfg.operator.kind}"}[stage]
    return root / f"{tag}-{cfg.stage_hash(stage)[:12]}"


def run_simulate(cfg: RunConfig, out) -> Path:
    scene = scene_of(cfg)
    src = draw_sources(cfg.sources.L, cfg.sources.R, cfg.sources.beta, cfg.seed)
    ds = simulate(scene, pulse_of(cfg), time_grid_of(cfg), src, t_pad=cfg.time.t_pad,
                  n_nodes=cfg.solver.n_nodes, threads=cfg.threads)
    meta = {"config_hash": cfg.stage_hash("simulate"), "seed": cfg.seed,
            "config": cfg.stage_dict("simulate")}
    return io.save_dataset(out, ds, meta)


def _noisy(arr, cfg, name):
    return add_noise(arr, cfg.noise.delta, noise_seed(cfg, name))


def build_operator(cfg: RunConfig, dataset) -> tuple[ImagingOperator, np.ndarray]:
    """Noise, kernel and operator for ``cfg.operator.kind``; returns ``(op, kernel)``."""
    kind = cfg.operator.kind
    tg = dataset.time_grid
    scene = scene_of(cfg)
    if kind == "C":
        if dataset.passive_x is None or dataset.passive_y is None:
            raise ValueError("operator C needs passive records")
        px = _noisy(dataset.passive_x, cfg, "passive_x")
        py = _noisy(dataset.passive_y, cfg, "passive_y")
        kernel = passive_kernel(px, py, dataset.incident, tg.dt, cfg.sources.R, cfg.sources.L,
                                scaling=cfg.operator.scaling).values
    else:
        if dataset.active is None:
            raise ValueError(f"operator {kind} needs active records")
        kernel = _noisy(dataset.active, cfg, "active")
    op = assemble_operator(kernel, kind, tg.dt, default_dy(scene), cfg.operator.n_op)
    return op, kernel


def run_assemble(cfg: RunConfig, dataset_dir, out) -> Path:
    ds = io.load_dataset(dataset_dir)
    op, kernel = build_operator(cfg, ds)
    meta = {"config_hash": cfg.stage_hash("assemble"), "kind": op.kind, "n_op": op.n_op,
            "J": op.J, "M": op.M, "dt": op.dt, "dy": op.dy, "noise": cfg.noise.delta,
            "noise_applied_to": ["passive_x", "passive_y"] if op.kind == "C" else ["active"],
            "dataset": io.read_manifest(dataset_dir)["meta"]["config_hash"]}
    return io.write_bundle(out, {"matrix": op.matrix, "kernel": kernel}, meta, "operator")


def load_operator(directory) -> ImagingOperator:
    arrays, man = io.read_bundle(directory, "operator")
    m = man["meta"]
    return ImagingOperator(arrays["matrix"], m["kind"], m["n_op"], m["J"], m["M"], m["dt"], m["dy"])


def compute_map(cfg: RunConfig, op: ImagingOperator):
    scene = scene_of(cfg)
    svd = truncated_svd(op, cfg.operator.ratio)
    lags = 2 * op.dt * np.arange(-op.n_op, op.n_op + 1)
    ac = autocorrelate(pulse_of(cfg))
    m = indicator_map(svd, grid_of(cfg), cfg.operator.tau, ac, scene.receivers, lags,
                      cfg.operator.amplitude)
    return m, svd, scene


def run_invert(cfg: RunConfig, operator_dir, out) -> Path:
    op = load_operator(operator_dir)
    m, svd, scene = compute_map(cfg, op)
    out = Path(out)
    summary = map_summary(m, scene)
    summary["singular_values_kept"] = svd.P
    meta = {"config_hash": cfg.stage_hash("invert"), "grid": {
        "xs0": float(m.grid.xs[0]), "ys0": float(m.grid.ys[0]), "spacing": m.grid.spacing,
        "center": list(m.grid.center), "radius": m.grid.radius,
        "shape": list(m.values.shape)}, "operator": io.read_manifest(operator_dir)["meta"]["config_hash"]}
    io.write_bundle(out, {"map": m.values}, meta, "map")
    render.write_csv(out / "map.csv", m.values, m.grid)
    render.write_pgm(out / "map.pgm", render.heatmap(m.values, m.grid))
    io.update_manifest(out, summary=summary)
    return out


def run_render(cfg: RunConfig, map_dir, out=None, overlay: bool = False) -> Path:
    """Re-render a stored map; ``overlay`` burns the true boundaries in."""
    arrays, man = io.read_bundle(map_dir, "map")
    grid = grid_of(cfg)
    values = arrays["map"]
    if values.shape != grid.shape:
        raise ValueError(f"map shape {values.shape} does not match the configured grid {grid.shape}")
    lines = [c.polygon(512) for c in scene_of(cfg).obstacles] if overlay else None
    lines = [np.vstack([p, p[:1]]) for p in lines] if lines else None
    img = render.heatmap(values, grid, overlay=lines)
    out = Path(out) if out else Path(map_dir) / ("map_overlay.pgm" if overlay else "map.pgm")
    render.write_pgm(out, img, burn_overlay=overlay)
    return out


def _cached(directory, cfg, stage) -> bool:
    return io.bundle_is_valid(directory, {"config_hash": cfg.stage_hash(stage)})


def run_pipeline(cfg: RunConfig, root=None) -> dict:
    """Run all stages, skipping any whose output is already present and intact."""
    result = {}
    steps = [("simulate", lambda d: run_simulate(cfg, d)),
             ("assemble", lambda d: run_assemble(cfg, result["simulate"]["dir"], d)),
             ("invert", lambda d: run_invert(cfg, result["assemble"]["dir"], d))]
    for stage, fn in steps:
        d = stage_dir(cfg, stage, root)
        hit = _cached(d, cfg, stage)
        if not hit:
            try:
                fn(d)
            except Exception as exc:  # label and re-raise
                raise StageError(stage, exc) from exc
            log.info("%s -> %s", stage, d)
        else:
            log.info("%s cached at %s", stage, d)
        result[stage] = {"dir": d, "cached": hit}
    png = run_render(cfg, result["invert"]["dir"], overlay=bool(cfg.scene.obstacles))
    result["render"] = {"dir": png, "cached": False}
    return result
