"""Numerical checks of the Helmholtz-Kirchhoff identities.

At zero damping the frequency-domain identity reads

    G(p, q) - conj(G(p, q)) ~ 2ik int_{|z|=R} G(p, z) conj(G(q, z)) ds(z)

and the same holds for the total field of a sound-soft obstacle. Its time
domain consequence says that the passive kernel ``c`` approximates the
antisymmetrized active record ``u_scat_chi~(t) - u_scat_chi~(-t)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.special import j0

from .geometry import draw_sources
from .correlation import passive_kernel
from .helmholtz import assemble_bie, green, solve_point_source
from .synthesis import TimeGrid, simulate

EPS_FLOOR = 1e-14


def relative_error(lhs, rhs) -> float:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    return float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), EPS_FLOOR))


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        if v.size == 1:
            return _jsonable(v.reshape(()).item())
        if v.size <= 16:  # points and short vectors are written out in full
            return _jsonable(v.tolist())
        return {"norm": float(np.linalg.norm(v)), "shape": list(v.shape)}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


@dataclass
class IdentityReport:
    identity: str
    params: dict
    lhs: object
    rhs: object
    error: float
    threshold: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.threshold is None or self.error <= self.threshold

    def to_dict(self) -> dict:
        return {"identity": self.identity, "params": _jsonable(self.params),
                "lhs": _jsonable(self.lhs), "rhs": _jsonable(self.rhs),
                "error": self.error, "threshold": self.threshold, "passed": self.passed,
                **({"extra": _jsonable(self.extra)} if self.extra else {})}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def circle_quadrature(R: float, L: int, beta: float = 0.0, seed=None):
    """Nodes of a (possibly jittered) source circle with the uniform weight ``2 pi R / L``."""
    src = draw_sources(L, R, beta, seed)
    return src.points, 2 * np.pi * R / L


def check_hk_free(k: float, p, q, R: float, L: int, threshold: float | None = None
                  ) -> IdentityReport:
    p, q = np.asarray(p, float), np.asarray(q, float)
    r = float(np.hypot(*(p - q)))
    lhs = 2j * (j0(k * r) / 4)  # 2i Im G(p, q); Im G -> 1/4 as q -> p
    z, w = circle_quadrature(R, L)
    rhs = 2j * k * w * np.sum(green(k, p[None], z)[0] * np.conj(green(k, q[None], z)[0]))
    return IdentityReport("HK-free", {"k": k, "p": p, "q": q, "R": R, "L": L},
                          lhs, rhs, relative_error(lhs, rhs), threshold)


def check_hk_total(k: float, p, q, scene, R: float, L: int, n_nodes: int = 128,
                   threshold: float | None = None) -> IdentityReport:
    """Total-field identity; ``extra`` carries the scattered-field version.

    Without obstacles the total field is the Green function and the check is
    delegated to :func:`check_hk_free`.
    """
    if not scene.obstacles:
        rep = check_hk_free(k, p, q, R, L, threshold)
        rep.identity = "HK-total"
        rep.params["obstacles"] = 0
        return rep
    p, q = np.asarray(p, float), np.asarray(q, float)
    z, w = circle_quadrature(R, L)
    panel = assemble_bie(scene, k, n_nodes)
    sol_z = solve_point_source(panel, z)
    u_pz, u_qz = sol_z.total(np.stack([p, q]))
    sol_q = solve_point_source(panel, q[None])
    u_pq = sol_q.total(p[None])[0, 0]
    us_pq = sol_q.scattered(p[None])[0, 0]

    lhs = u_pq - np.conj(u_pq)
    rhs = 2j * k * w * np.sum(u_pz * np.conj(u_qz))
    g = green(k, p, q)
    lhs_s = us_pq - np.conj(us_pq)
    rhs_s = rhs - (g - np.conj(g))
    extra = {"scattered_error": relative_error(lhs_s, rhs_s), "lhs_real_residue": abs(lhs.real)}
    return IdentityReport("HK-total", {"k": k, "p": p, "q": q, "R": R, "L": L,
                                       "obstacles": len(scene.obstacles)},
                          lhs, rhs, relative_error(lhs, rhs), threshold, extra)


def compare_kernel(kernel, active, incident=None, threshold: float | None = None,
                   params=None) -> IdentityReport:
    """Compare the passive kernel with the antisymmetrized active record.

    With no obstacle the right side vanishes; then the error is reported
    against ``max |Phi_chi~|`` instead (absolute level).
    """
    c = np.asarray(getattr(kernel, "values", kernel), float)
    active = np.asarray(active, float)
    if c.shape != active.shape:
        raise ValueError(f"kernel {c.shape} and active data {active.shape} differ")
    target = active - active[::-1]
    if np.abs(target).max() == 0:
        if incident is None:
            raise ValueError("free-space comparison needs the incident term")
        err = float(np.abs(c).max() / np.abs(incident).max())
        return IdentityReport("HK-time", dict(params or {}, free_space=True), c, target,
                              err, threshold)
    return IdentityReport("HK-time", dict(params or {}, free_space=False), target, c,
                          relative_error(target, c), threshold)


def check_hk_time(scene, pulse, R: float, L: int, beta: float, seed=0, time_grid=None,
                  threshold: float | None = None, n_nodes: int = 128, threads: int = 1,
                  dataset=None) -> IdentityReport:
    """Simulate passive and active data, then compare ``c`` with the active records.

    A precomputed ``dataset`` for the same scene and sources may be passed in.
    """
    tg = time_grid or TimeGrid()
    if dataset is None:
        src = draw_sources(L, R, beta, seed)
        dataset = simulate(scene, pulse, tg, src, n_nodes=n_nodes, threads=threads)
    kern = passive_kernel(dataset.passive_x, dataset.passive_y, dataset.incident, tg.dt, R, L)
    params = {"R": R, "L": L, "beta": beta, "seed": seed, "dt": tg.dt, "N": tg.N,
              "obstacles": len(scene.obstacles)}
    return compare_kernel(kern, dataset.active, dataset.incident, threshold, params)


def load_baselines() -> dict:
    text = resources.files("passive_lsm").joinpath("baselines.json").read_text()
    return json.loads(text)


def baseline_limit(name: str, baselines: dict | None = None) -> float:
    """Pass threshold: the recorded value plus its allowed regression margin."""
    b = (baselines or load_baselines())[name]
    return float(b["value"]) * (1.0 + float(b.get("margin", 0.0)))


def standard_pair(center=(1.0, 1.0), separation: float = 1.0):
    c = np.asarray(center, float)
    return c - [separation / 2, 0.0], c + [separation / 2, 0.0]


def decay_is_monotone(reports) -> bool:
    errs = [r.error for r in reports]
    return all(b < a for a, b in zip(errs, errs[1:]))
