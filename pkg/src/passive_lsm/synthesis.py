"""Time-domain records from per-frequency Helmholtz solves.

A record is synthesized as ``u(t) = (1/pi) Re sum_j w_j exp(-i k_j t) W(k_j) u_hat(k_j)``
where the weight ``W`` is the pulse transform (``chi`` records) or its
squared modulus (``chi~`` records). The wavenumbers sit at the midpoints
``(j - 1/2) dk`` of a grid with ``dk = 2 pi / t_pad``, so the synthesized
signal is anti-periodic with period ``t_pad`` and no sample sits on the
logarithmic singularity of the planar Green function at ``k = 0``.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import RandomSourceSet, Scene
from .helmholtz import assemble_bie, green, solve_point_source
from .pulse import Pulse, fourier_transform

log = logging.getLogger(__name__)

KINDS = ("chi", "chitilde")
INCIDENT_PAD = 4


@dataclass(frozen=True)
class TimeGrid:
    """Passive records at ``n dt`` (``n = 0..2N``) and lags at ``2 n' dt`` (``n' = -N..N``)."""

    dt: float = 0.1
    N: int = 200

    def __post_init__(self):
        if self.dt <= 0 or self.N < 1:
            raise ValueError("need dt > 0 and N >= 1")

    @property
    def T(self) -> float:
        return 2 * self.N * self.dt

    @property
    def record_times(self) -> np.ndarray:
        return self.dt * np.arange(2 * self.N + 1)

    @property
    def lag_times(self) -> np.ndarray:
        return 2 * self.dt * np.arange(-self.N, self.N + 1)

    def to_dict(self):
        return {"dt": self.dt, "N": self.N}


@dataclass(frozen=True)
class FrequencyPlan:
    k: np.ndarray
    dk: float
    t_pad: float
    chi_hat: np.ndarray
    dropped_energy: float

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.k.shape, self.dk)

    def pulse_weight(self, kind: str) -> np.ndarray:
        if kind == "chi":
            return self.chi_hat
        if kind == "chitilde":
            return np.abs(self.chi_hat) ** 2
        raise ValueError(f"unknown pulse weighting {kind!r}; expected one of {KINDS}")


def plan_frequencies(pulse: Pulse, time_grid: TimeGrid, t_pad: float | None = None,
                     band_tol: float = 1e-6, k_max: float = 40.0) -> FrequencyPlan:
    """Choose the synthesis wavenumbers.

    ``t_pad`` defaults to ``4 T`` and may not be shorter than ``2 T``. Nodes
    where ``|chi_hat| < band_tol * peak`` are dropped; ``dropped_energy`` is the
    dropped share of ``sum |chi_hat|^2``.
    """
    t_pad = 4 * time_grid.T if t_pad is None else float(t_pad)
    if t_pad < 2 * time_grid.T:
        raise ValueError(f"t_pad={t_pad} must be at least 2T={2 * time_grid.T}")
    dk = 2 * np.pi / t_pad
    k_all = dk * (np.arange(int(np.ceil(k_max / dk))) + 0.5)
    chi_all = fourier_transform(pulse, k_all)
    mag = np.abs(chi_all)
    keep = mag >= band_tol * mag.max()
    if not keep.any():
        raise ValueError("empty frequency band")
    energy = (mag ** 2).sum()
    dropped = float((mag[~keep] ** 2).sum() / energy)
    return FrequencyPlan(k=k_all[keep], dk=dk, t_pad=t_pad, chi_hat=chi_all[keep],
                         dropped_energy=dropped)


@dataclass
class FrequencyData:
    """Complex responses at every planned wavenumber.

    ``total``: total field at ``points`` for ``sources``, shape ``(K, P, S)``.
    ``scattered``: scattered part of it. Either may be None if not requested.
    """

    plan: FrequencyPlan
    points: np.ndarray
    sources: np.ndarray
    total: np.ndarray | None = None
    scattered: np.ndarray | None = None
    max_residual: float = 0.0
    max_condition: float = 1.0


def frequency_responses(scene: Scene, plan: FrequencyPlan, points, sources, n_nodes: int = 128,
                        want=("total", "scattered"), threads: int = 1,
                        check_residual: bool = False) -> FrequencyData:
    """Solve the exterior problem at each planned wavenumber.

    Solves at different wavenumbers are independent; with ``threads > 1``
    they run on a thread pool and results are placed by index, so the output
    does not depend on the thread count.
    """
    points = np.atleast_2d(np.asarray(points, float))
    sources = np.atleast_2d(np.asarray(sources, float))
    for curve in scene.obstacles:
        if curve.contains(sources).any() or curve.contains(points).any():
            raise ValueError("source or receiver inside an obstacle")

    def one(k):
        panel = assemble_bie(scene, k, n_nodes)
        sol = solve_point_source(panel, sources)
        scat = sol.scattered(points)
        res = sol.boundary_residual() if check_residual else 0.0
        return scat, res, panel.condition

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(one, plan.k))
    else:
        results = [one(k) for k in plan.k]
    scat = np.stack([r[0] for r in results])
    data = FrequencyData(plan=plan, points=points, sources=sources,
                         max_residual=max(r[1] for r in results),
                         max_condition=max(r[2] for r in results))
    if "scattered" in want:
        data.scattered = scat
    if "total" in want:
        data.total = scat + np.stack([green(k, points, sources) for k in plan.k])
    return data


def incident_spectrum(plan: FrequencyPlan, points, sources) -> np.ndarray:
    """``G_k(p, q)`` on the plan, shape ``(K, P, Q)``."""
    return np.stack([green(k, points, sources) for k in plan.k])


def synthesize(values, plan: FrequencyPlan, times, kind: str = "chi") -> np.ndarray:
    """Real time samples from complex responses of shape ``(K, ...)``."""
    values = np.asarray(values)
    if values.shape[0] != plan.k.size:
        raise ValueError(f"expected {plan.k.size} frequency slices, got {values.shape[0]}")
    times = np.asarray(times, dtype=float)
    coef = plan.pulse_weight(kind) * plan.weights / np.pi
    E = np.exp(-1j * np.outer(times, plan.k)) * coef[None, :]
    flat = values.reshape(plan.k.size, -1)
    out = (E @ flat).real
    return out.reshape((times.size,) + values.shape[1:])


@dataclass
class PulsedFieldSet:
    """Real samples indexed ``(time, receiver, source)``."""

    values: np.ndarray
    times: np.ndarray
    pulse_kind: str
    field_kind: str
    seed: int | None = None
    noise: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.values.shape

    def with_values(self, values, **changes):
        kw = dict(values=values, times=self.times, pulse_kind=self.pulse_kind,
                  field_kind=self.field_kind, seed=self.seed, noise=self.noise,
                  meta=dict(self.meta))
        kw.update(changes)
        return PulsedFieldSet(**kw)


def synthesize_field(data: FrequencyData, times, kind: str = "chi",
                     field_kind: str = "total") -> PulsedFieldSet:
    """Synthesize ``total`` or ``scattered`` records with ``chi`` or ``chi~`` weighting."""
    vals = getattr(data, field_kind, None)
    if vals is None:
        raise ValueError(f"frequency data has no {field_kind!r} responses")
    return PulsedFieldSet(values=synthesize(vals, data.plan, times, kind),
                          times=np.asarray(times, float), pulse_kind=kind, field_kind=field_kind)


def incident_correlation(plan: FrequencyPlan, receivers, sources, lag_times) -> PulsedFieldSet:
    """``Phi_chi~(t, p; q)``: the free-space field of the ``chi~`` pulse."""
    receivers = np.atleast_2d(receivers)
    sources = np.atleast_2d(sources)
    gap = np.sqrt(((receivers[:, None] - sources[None]) ** 2).sum(-1))
    if np.any(gap == 0):
        raise ValueError("incident correlation needs distinct points p != q")
    vals = synthesize(incident_spectrum(plan, receivers, sources), plan, lag_times, "chitilde")
    return PulsedFieldSet(values=vals, times=np.asarray(lag_times, float),
                          pulse_kind="chitilde", field_kind="incident")


def add_noise(fields, delta: float, seed=None):
    """Multiplicative noise ``u + delta (2 mu - 1) |u|`` with ``mu ~ U[0, 1]`` per sample.

    Accepts a PulsedFieldSet or a plain array and returns the same type.
    """
    if delta < 0:
        raise ValueError("noise level must be non-negative")
    is_set = isinstance(fields, PulsedFieldSet)
    u = fields.values if is_set else np.asarray(fields, dtype=float)
    if delta == 0:
        noisy = u.copy()
    else:
        mu = np.random.default_rng(seed).random(u.shape)
        noisy = u + delta * (2 * mu - 1) * np.abs(u)
    if is_set:
        return fields.with_values(noisy, noise=float(delta), seed=seed)
    return noisy


@dataclass
class Dataset:
    """Everything the imaging operators need for one experiment.

    ``passive_x``/``passive_y``: total ``chi`` records at receivers and at
    source-test points from each random source, ``(2N+1, J|M, L)``.
    ``active``: scattered ``chi~`` records ``(2N+1 lags, J, M)``.
    ``incident``: ``Phi_chi~`` on the lag grid, ``(2N+1, J, M)``.
    """

    time_grid: TimeGrid
    passive_x: np.ndarray | None
    passive_y: np.ndarray | None
    active: np.ndarray | None
    incident: np.ndarray | None
    meta: dict = field(default_factory=dict)

    ARRAYS = ("passive_x", "passive_y", "active", "incident")

    def arrays(self) -> dict:
        return {name: getattr(self, name) for name in self.ARRAYS
                if getattr(self, name) is not None}


def simulate(scene: Scene, pulse: Pulse, time_grid: TimeGrid, source_set: RandomSourceSet | None,
             t_pad: float | None = None, n_nodes: int = 128, threads: int = 1,
             passive: bool = True, active: bool = True) -> Dataset:
    """Simulate passive records for ``source_set`` and the active reference data."""
    plan = plan_frequencies(pulse, time_grid, t_pad)
    rx, tx = scene.receivers, scene.sources
    J = len(rx)
    px = py = act = inc = None
    if passive:
        if source_set is None:
            raise ValueError("passive simulation needs a random source set")
        pts = np.concatenate([rx, tx])
        fd = frequency_responses(scene, plan, pts, source_set.points, n_nodes,
                                 want=("total",), threads=threads)
        rec = synthesize(fd.total, plan, time_grid.record_times, "chi")
        px, py = rec[:, :J], rec[:, J:]
    if active:
        fd = frequency_responses(scene, plan, rx, tx, n_nodes, want=("scattered",),
                                 threads=threads)
        act = synthesize(fd.scattered, plan, time_grid.lag_times, "chitilde")
    # no solver involved, so the incident term affords a longer period and a
    # smaller wrap-around error from the slow 1/t tail of the planar kernel
    inc_plan = plan_frequencies(pulse, time_grid, INCIDENT_PAD * plan.t_pad)
    inc = incident_correlation(inc_plan, rx, tx, time_grid.lag_times).values
    meta = {
        "scene": scene.to_dict(),
        "pulse": pulse.to_dict(),
        "time_grid": time_grid.to_dict(),
        "sources": None if source_set is None else source_set.to_dict(),
        "frequencies": {"count": int(plan.k.size), "dk": plan.dk, "t_pad": plan.t_pad,
                        "k_min": float(plan.k.min()), "k_max": float(plan.k.max()),
                        "dropped_energy": plan.dropped_energy,
                        "incident_t_pad": inc_plan.t_pad},
        "n_nodes": n_nodes,
    }
    log.info("simulated %d frequencies, J=%d M=%d", plan.k.size, J, len(tx))
    return Dataset(time_grid=time_grid, passive_x=px, passive_y=py, active=act, incident=inc,
                   meta=meta)
