"""Run configuration: a nested YAML document with defaults from the numerical examples.

Schema (all keys optional)::

    scene:
      obstacles: [{shape: ellipse}]       # ellipse | kite | disk(center, radius)
      center: [1.0, 1.0]                  # centre of the measurement rings
      radii: [2.5]                        # one or more concentric rings
      n_points: 30                        # points per ring, split into x_j / y_m
      aperture: null                      # or [lo, hi] in radians
      sampling_center: [1.0, 1.0]
      sampling_radius: 2.2
    pulse: {omega: 4.0, alpha: 1.6, t0: 3.0}
    time: {T: 40.0, dt: 0.1, t_pad: null}    # t_pad null -> 4 T
    sources: {L: 80, R: 20.0, beta: 0.1}
    noise: {delta: 0.05}
    operator: {kind: C, n_op: null, tau: 0.0, ratio: 0.005,
               scaling: consistent, amplitude: 3d}
    grid: {spacing: 0.04}
    solver: {n_nodes: 128}
    seed: 0
    threads: 1
    output: runs/default
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields

import yaml

from .correlation import SCALINGS
from .operators import OPERATOR_KINDS


class ConfigError(ValueError):
    pass


@dataclass
class SceneConfig:
    obstacles: list = field(default_factory=lambda: [{"shape": "ellipse"}])
    center: list = field(default_factory=lambda: [1.0, 1.0])
    radii: list = field(default_factory=lambda: [2.5])
    n_points: int = 30
    aperture: list | None = None
    sampling_center: list = field(default_factory=lambda: [1.0, 1.0])
    sampling_radius: float = 2.2


@dataclass
class PulseConfig:
    omega: float = 4.0
    alpha: float = 1.6
    t0: float = 3.0


@dataclass
class TimeConfig:
    T: float = 40.0
    dt: float = 0.1
    t_pad: float | None = None

    @property
    def N(self) -> int:
        n = self.T / (2 * self.dt)
        if abs(n - round(n)) > 1e-9:
            raise ConfigError(f"T={self.T} is not an even multiple of dt={self.dt}")
        return int(round(n))


@dataclass
class SourceConfig:
    L: int = 80
    R: float = 20.0
    beta: float = 0.1


@dataclass
class NoiseConfig:
    delta: float = 0.05


@dataclass
class OperatorConfig:
    kind: str = "C"
    n_op: int | None = None
    tau: float = 0.0
    ratio: float = 0.005
    scaling: str = "consistent"
    amplitude: str = "3d"


@dataclass
class GridConfig:
    spacing: float = 0.04


@dataclass
class SolverConfig:
    n_nodes: int = 128


_SECTIONS = {"scene": SceneConfig, "pulse": PulseConfig, "time": TimeConfig,
             "sources": SourceConfig, "noise": NoiseConfig, "operator": OperatorConfig,
             "grid": GridConfig, "solver": SolverConfig}


@dataclass
class RunConfig:
    scene: SceneConfig = field(default_factory=SceneConfig)
    pulse: PulseConfig = field(default_factory=PulseConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    sources: SourceConfig = field(default_factory=SourceConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    operator: OperatorConfig = field(default_factory=OperatorConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 0
    threads: int = 1
    output: str = "runs/default"

    def __post_init__(self):
        self.validate()

    def validate(self):
        def positive(name, v):
            if v is None or v <= 0:
                raise ConfigError(f"{name} must be positive, got {v}")

        positive("time.dt", self.time.dt)
        positive("time.T", self.time.T)
        self.time.N  # noqa: B018 - raises on a bad T/dt pair
        if self.time.t_pad is not None and self.time.t_pad < 2 * self.time.T:
            raise ConfigError("time.t_pad must be at least 2 T")
        positive("pulse.alpha", self.pulse.alpha)
        positive("pulse.omega", self.pulse.omega)
        positive("sources.L", self.sources.L)
        positive("sources.R", self.sources.R)
        if not 0 <= self.sources.beta <= 1:
            raise ConfigError("sources.beta must lie in [0, 1]")
        if self.noise.delta < 0:
            raise ConfigError("noise.delta must be non-negative")
        if self.operator.kind not in OPERATOR_KINDS:
            raise ConfigError(f"operator.kind must be one of {OPERATOR_KINDS}")
        if self.operator.scaling not in SCALINGS:
            raise ConfigError(f"operator.scaling must be one of {SCALINGS}")
        if self.operator.amplitude not in ("3d", "2d"):
            raise ConfigError("operator.amplitude must be 3d or 2d")
        if not 0 < self.operator.ratio <= 1:
            raise ConfigError("operator.ratio must lie in (0, 1]")
        if self.operator.n_op is not None and not 0 < self.operator.n_op <= self.time.N:
            raise ConfigError(f"operator.n_op must lie in 1..{self.time.N}")
        positive("grid.spacing", self.grid.spacing)
        positive("scene.sampling_radius", self.scene.sampling_radius)
        if not self.scene.radii or min(self.scene.radii) <= 0:
            raise ConfigError("scene.radii must be positive")
        if self.solver.n_nodes < 8 or self.solver.n_nodes % 2:
            raise ConfigError("solver.n_nodes must be an even number >= 8")
        positive("threads", self.threads)

    @property
    def needs_passive(self) -> bool:
        return self.operator.kind == "C"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict | None) -> "RunConfig":
        d = copy.deepcopy(d or {})
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        kw = {}
        for name, value in d.items():
            if name in _SECTIONS:
                sec = _SECTIONS[name]
                sec_known = {f.name for f in fields(sec)}
                bad = set(value or {}) - sec_known
                if bad:
                    raise ConfigError(f"unknown keys in {name}: {sorted(bad)}")
                kw[name] = sec(**(value or {}))
            else:
                kw[name] = value
        return cls(**kw)

    def override(self, **changes) -> "RunConfig":
        """Copy with dotted-path overrides, e.g. ``override(**{"sources.beta": 0.9})``."""
        d = self.to_dict()
        for key, value in changes.items():
            node = d
            *path, leaf = key.split(".")
            for p in path:
                node = node[p]
            if leaf not in node:
                raise ConfigError(f"unknown config key {key!r}")
            node[leaf] = value
        return RunConfig.from_dict(d)

    def stage_dict(self, stage: str) -> dict:
        """The subset of settings a pipeline stage depends on."""
        d = self.to_dict()
        sim = {k: d[k] for k in ("scene", "pulse", "time", "sources", "solver", "seed")}
        if stage == "simulate":
            return sim
        asm = dict(sim, noise=d["noise"], operator={k: d["operator"][k]
                                                    for k in ("kind", "n_op", "scaling")})
        if stage == "assemble":
            return asm
        if stage == "invert":
            return dict(asm, operator=d["operator"], grid=d["grid"])
        raise ValueError(f"unknown stage {stage!r}")

    def stage_hash(self, stage: str) -> str:
        return config_hash(self.stage_dict(stage))


def config_hash(d: dict) -> str:
    text = json.dumps(d, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def dumps(config: RunConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=False)


def loads(text: str) -> RunConfig:
    data = yaml.safe_load(text)
    if data is not None and not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return RunConfig.from_dict(data)


def load(path) -> RunConfig:
    with open(path) as fh:
        return loads(fh.read())


def save(config: RunConfig, path):
    with open(path, "w") as fh:
        fh.write(dumps(config))
