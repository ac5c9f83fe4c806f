"""Boundary curves, measurement rings, random source sets and sampling grids.

All lengths are in the dimensionless units of the scattering setup (wave
speed 1, so lengths and times share a unit).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi


class BoundaryCurve:
    """A closed, 2*pi periodic, counterclockwise parametrized curve.

    Subclasses implement ``point``, ``deriv`` and ``deriv2``; each accepts an
    array of angles and returns an array of shape ``theta.shape + (2,)``.
    """

    name = "curve"
    closed = True

    def point(self, theta):
        raise NotImplementedError

    def deriv(self, theta):
        raise NotImplementedError

    def deriv2(self, theta):
        raise NotImplementedError

    def params(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        return {"shape": self.name, **self.params()}

    def polygon(self, n: int = 2048) -> np.ndarray:
        theta = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return self.point(theta)

    def contains(self, pts) -> np.ndarray:
        """Even-odd point-in-polygon test against a fine polygonal trace."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        poly = self.polygon()
        x, y = pts[:, 0][:, None], pts[:, 1][:, None]
        x0, y0 = poly[:, 0], poly[:, 1]
        x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
        straddle = (y0 > y) != (y1 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xcross = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        hits = straddle & (x < xcross)
        return (hits.sum(axis=1) % 2) == 1

    def distance(self, pts) -> np.ndarray:
        """Distance from each point to the curve (polygon vertex resolution)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        poly = self.polygon(4096)
        d = np.empty(len(pts))
        for start in range(0, len(pts), 512):
            chunk = pts[start:start + 512]
            diff = chunk[:, None, :] - poly[None, :, :]
            d[start:start + 512] = np.sqrt((diff ** 2).sum(-1)).min(axis=1)
        return d

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class Ellipse(BoundaryCurve):
    """``(cx + a cos t, cy + b sin t)``."""

    name = "ellipse"

    def __init__(self, center=(1.0, 1.0), semi_axes=(0.25, 0.5)):
        self.center = tuple(float(c) for c in center)
        self.semi_axes = tuple(float(s) for s in semi_axes)
        if min(self.semi_axes) <= 0:
            raise ValueError("ellipse semi-axes must be positive")

    def point(self, theta):
        theta = np.asarray(theta, dtype=float)
        a, b = self.semi_axes
        return np.stack([self.center[0] + a * np.cos(theta),
                         self.center[1] + b * np.sin(theta)], axis=-1)

    def deriv(self, theta):
        theta = np.asarray(theta, dtype=float)
        a, b = self.semi_axes
        return np.stack([-a * np.sin(theta), b * np.cos(theta)], axis=-1)

    def deriv2(self, theta):
        theta = np.asarray(theta, dtype=float)
        a, b = self.semi_axes
        return np.stack([-a * np.cos(theta), -b * np.sin(theta)], axis=-1)

    def params(self):
        return {"center": list(self.center), "semi_axes": list(self.semi_axes)}


class Disk(Ellipse):
    name = "disk"

    def __init__(self, center=(0.0, 0.0), radius=1.0):
        if radius <= 0:
            raise ValueError(f"disk radius must be positive, got {radius}")
        super().__init__(center, (radius, radius))
        self.radius = float(radius)

    def params(self):
        return {"center": list(self.center), "radius": self.radius}


class Kite(BoundaryCurve):
    """``(cx + a cos t + c cos 2t, cy + b sin t)``."""

    name = "kite"

    def __init__(self, center=(1.0, 1.0), a=0.25, b=0.5, c=0.25):
        self.center = tuple(float(v) for v in center)
        self.a, self.b, self.c = float(a), float(b), float(c)

    def point(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.stack([
            self.center[0] + self.a * np.cos(theta) + self.c * np.cos(2 * theta),
            self.center[1] + self.b * np.sin(theta)], axis=-1)

    def deriv(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.stack([-self.a * np.sin(theta) - 2 * self.c * np.sin(2 * theta),
                         self.b * np.cos(theta)], axis=-1)

    def deriv2(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.stack([-self.a * np.cos(theta) - 4 * self.c * np.cos(2 * theta),
                         -self.b * np.sin(theta)], axis=-1)

    def params(self):
        return {"center": list(self.center), "a": self.a, "b": self.b, "c": self.c}


_SHAPES = {"ellipse": Ellipse, "kite": Kite, "disk": Disk}


def make_shape(name: str, **params) -> BoundaryCurve:
    """Build one of the shipped obstacle boundaries.

    With no parameters ``ellipse`` and ``kite`` give the obstacles of the
    numerical examples, both centred at (1, 1). ``disk`` needs ``center``
    and ``radius``.

    >>> make_shape("ellipse").point(0.0)
    array([1.25, 1.  ])
    """
    try:
        cls = _SHAPES[name]
    except KeyError:
        raise ValueError(f"unknown shape {name!r}; expected one of {sorted(_SHAPES)}") from None
    if name == "disk" and "radius" not in params:
        raise ValueError("disk requires a radius")
    return cls(**params)


def shape_from_dict(d: dict) -> BoundaryCurve:
    d = dict(d)
    return make_shape(d.pop("shape"), **d)


@dataclass(frozen=True)
class Scene:
    """Obstacles plus the measurement and sampling geometry.

    ``ring_points`` holds every measurement point ``a_i`` (all rings); the
    receivers ``x_j`` and source-test points ``y_m`` are interleaved subsets.
    """

    obstacles: tuple
    center: tuple = (1.0, 1.0)
    radii: tuple = (2.5,)
    n_points: int = 30
    aperture: tuple | None = None
    sampling_center: tuple = (1.0, 1.0)
    sampling_radius: float = 2.2
    ring_points: np.ndarray = field(repr=False, default=None)
    ring_angles: np.ndarray = field(repr=False, default=None)
    receivers: np.ndarray = field(repr=False, default=None)
    sources: np.ndarray = field(repr=False, default=None)

    @property
    def J(self) -> int:
        return len(self.receivers)

    @property
    def M(self) -> int:
        return len(self.sources)

    @property
    def measurement_radius(self) -> float:
        return float(np.mean(self.radii))

    def inside(self, pts) -> np.ndarray:
        """True where a point lies inside any obstacle."""
        pts = np.atleast_2d(pts)
        out = np.zeros(len(pts), dtype=bool)
        for curve in self.obstacles:
            out |= curve.contains(pts)
        return out

    def distance_to_obstacles(self, pts) -> np.ndarray:
        pts = np.atleast_2d(pts)
        if not self.obstacles:
            return np.full(len(pts), np.inf)
        return np.min([c.distance(pts) for c in self.obstacles], axis=0)

    def to_dict(self) -> dict:
        return {
            "obstacles": [c.to_dict() for c in self.obstacles],
            "center": list(self.center),
            "radii": list(self.radii),
            "n_points": self.n_points,
            "aperture": None if self.aperture is None else list(self.aperture),
            "sampling_center": list(self.sampling_center),
            "sampling_radius": self.sampling_radius,
        }


def measurement_angles(n_points: int = 30) -> np.ndarray:
    """Equiangular angles on [-pi, pi), starting at -pi."""
    return -np.pi + TWO_PI * np.arange(n_points) / n_points


def build_scene(obstacles=(), center=(1.0, 1.0), radii=(2.5,), n_points=30,
                aperture=None, sampling_center=(1.0, 1.0),
                sampling_radius=2.2) -> Scene:
    """Place the measurement points and validate the geometry.

    On each ring the ``n_points`` equiangular points ``a_1..a_n`` (angles from
    -pi counterclockwise) are split as ``x_j = a_{2j}``, ``y_m = a_{2m-1}``.
    With an ``aperture=(lo, hi)`` only points with angle strictly inside the
    interval are kept, so ``J`` and ``M`` may differ.
    """
    obstacles = tuple(shape_from_dict(o) if isinstance(o, dict) else o for o in obstacles)
    center = tuple(float(c) for c in center)
    radii = tuple(float(r) for r in radii)
    if n_points < 2 or n_points % 2:
        raise ValueError("n_points must be a positive even number")
    if aperture is not None:
        lo, hi = (float(a) for a in aperture)
        if not (-np.pi <= lo < hi <= np.pi):
            raise ValueError(f"aperture {aperture} must satisfy -pi <= lo < hi <= pi")
        aperture = (lo, hi)

    ang = measurement_angles(n_points)
    keep = np.ones(n_points, dtype=bool)
    if aperture is not None:
        # strict, with a rounding margin so edge points never slip in
        eps = 1e-12
        keep = (ang > aperture[0] + eps) & (ang < aperture[1] - eps)
    # 1-based a_{2j} is 0-based odd index
    is_receiver = (np.arange(n_points) % 2) == 1

    pts, angles, rx, tx = [], [], [], []
    unit = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    for r in radii:
        ring = np.asarray(center) + r * unit
        pts.append(ring[keep])
        angles.append(ang[keep])
        rx.append(ring[keep & is_receiver])
        tx.append(ring[keep & ~is_receiver])
    ring_points = np.concatenate(pts)
    receivers = np.concatenate(rx)
    sources = np.concatenate(tx)
    if len(receivers) == 0 or len(sources) == 0:
        raise ValueError("aperture leaves no receivers or no source-test points")

    for curve in obstacles:
        trace = curve.polygon(1024)
        rad = np.hypot(*(trace - np.asarray(center)).T)
        if rad.max() >= min(radii):
            raise ValueError(f"obstacle {curve!r} reaches the measurement circle")
        if curve.contains(ring_points).any():
            raise ValueError(f"obstacle {curve!r} contains measurement points")

    return Scene(obstacles=obstacles, center=center, radii=radii, n_points=n_points,
                 aperture=aperture, sampling_center=tuple(float(c) for c in sampling_center),
                 sampling_radius=float(sampling_radius), ring_points=ring_points,
                 ring_angles=np.concatenate(angles), receivers=receivers, sources=sources)


def scene_from_dict(d: dict) -> Scene:
    d = dict(d)
    d["obstacles"] = [shape_from_dict(o) for o in d.get("obstacles", [])]
    return build_scene(**d)


@dataclass(frozen=True)
class SamplingGrid:
    """Square lattice over the sampling disk's bounding box.

    ``points`` has shape ``(ny, nx, 2)``; ``mask`` is True strictly inside the
    disk. Values at masked-out points are never computed.
    """

    xs: np.ndarray
    ys: np.ndarray
    spacing: float
    center: tuple
    radius: float

    @property
    def shape(self):
        return (len(self.ys), len(self.xs))

    @property
    def points(self) -> np.ndarray:
        X, Y = np.meshgrid(self.xs, self.ys)
        return np.stack([X, Y], axis=-1)

    @property
    def mask(self) -> np.ndarray:
        X, Y = np.meshgrid(self.xs, self.ys)
        return np.hypot(X - self.center[0], Y - self.center[1]) < self.radius

    def active_points(self) -> np.ndarray:
        return self.points[self.mask]


def sampling_grid(center=(1.0, 1.0), radius=2.2, spacing=0.04) -> SamplingGrid:
    if spacing <= 0 or radius <= 0:
        raise ValueError("spacing and radius must be positive")
    m = int(np.floor(radius / spacing + 1e-9))
    offs = spacing * np.arange(-m, m + 1)
    return SamplingGrid(xs=center[0] + offs, ys=center[1] + offs, spacing=float(spacing),
                        center=tuple(float(c) for c in center), radius=float(radius))


@dataclass(frozen=True)
class RandomSourceSet:
    """Sources ``R (cos t_l, sin t_l)`` with ``t_l = 2 pi (l - 1 + beta_l) / L``."""

    L: int
    R: float
    beta: float
    seed: int | None
    jitter: np.ndarray = field(repr=False)

    @property
    def angles(self) -> np.ndarray:
        return TWO_PI / self.L * (np.arange(self.L) + self.jitter)

    @property
    def points(self) -> np.ndarray:
        th = self.angles
        return self.R * np.stack([np.cos(th), np.sin(th)], axis=-1)

    def to_dict(self) -> dict:
        return {"L": self.L, "R": self.R, "beta": self.beta, "seed": self.seed}


def draw_sources(L: int, R: float, beta: float, seed=None) -> RandomSourceSet:
    """Draw ``beta_l ~ U[0, beta]`` once; the set is frozen afterwards."""
    if L < 1:
        raise ValueError("need at least one source")
    if R <= 0:
        raise ValueError("source radius must be positive")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("random level beta must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    jitter = rng.uniform(0.0, beta, size=L) if beta > 0 else np.zeros(L)
    return RandomSourceSet(L=int(L), R=float(R), beta=float(beta), seed=seed, jitter=jitter)
