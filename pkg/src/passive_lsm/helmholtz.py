"""Exterior Dirichlet Helmholtz problems in the plane.

Scattered fields are represented by the combined layer potential
``u = (D - i eta S) psi`` with ``eta = k`` and solved by Nystrom
discretization with the logarithmic-singularity quadrature of Kress
(trigonometric product weights on an equispaced parametrization). All
obstacles are coupled in one dense system.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from scipy.special import hankel1, j0, j1, jv, y0, y1

log = logging.getLogger(__name__)

EULER_GAMMA = 0.57721566490153286061


def _h0(z):
    return j0(z) + 1j * y0(z)


def _h1(z):
    return j1(z) + 1j * y1(z)


def _dist(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.sqrt(((x[..., :, None, :] - y[..., None, :, :]) ** 2).sum(-1))


def green(k: float, x, y) -> np.ndarray:
    """Outgoing fundamental solution ``(i/4) H0(k|x - y|)``.

    ``x`` and ``y`` are arrays of points, shapes ``(P, 2)`` and ``(Q, 2)``;
    the result has shape ``(P, Q)``. Single points give a scalar.
    """
    scalar = np.ndim(x) == 1 and np.ndim(y) == 1
    r = _dist(np.atleast_2d(x), np.atleast_2d(y))
    if k <= 0:
        raise ValueError("wavenumber must be positive")
    if np.any(r == 0):
        raise ValueError("coincident source and target points")
    g = 0.25j * _h0(k * r)
    return g[0, 0] if scalar else g


def green_normal_derivative(k: float, x, y, normal) -> np.ndarray:
    """``d/dn(y) G(x, y)`` for unit normals attached to the points ``y``."""
    x, y = np.atleast_2d(x), np.atleast_2d(y)
    d = x[:, None, :] - y[None, :, :]
    r = np.sqrt((d ** 2).sum(-1))
    cos = (d * np.asarray(normal)[None, :, :]).sum(-1) / r
    return 0.25j * k * _h1(k * r) * cos


def _log_weights(n: int, d) -> np.ndarray:
    """Kress weights for ``int log(4 sin^2((t - s)/2)) f(s) ds``.

    ``n`` (even) equispaced nodes; ``d`` holds the differences ``t - s_j``.
    """
    half = n // 2
    m = np.arange(1, half)
    d = np.asarray(d, dtype=float)
    out = -(2 * np.pi / half) * (np.cos(d[..., None] * m) / m).sum(-1)
    return out - (np.pi / half ** 2) * np.cos(half * d)


@lru_cache(maxsize=8)
def _collocation_weights(n: int) -> np.ndarray:
    t = 2 * np.pi * np.arange(n) / n
    w = _log_weights(n, t[:, None] - t[None, :])
    w.flags.writeable = False
    return w


def _curve_frame(curve, t):
    x, dx, ddx = curve.point(t), curve.deriv(t), curve.deriv2(t)
    speed = np.hypot(dx[:, 0], dx[:, 1])
    nvec = np.stack([dx[:, 1], -dx[:, 0]], axis=-1)  # |x'| times outward normal
    return x, dx, ddx, speed, nvec


def _self_rows(curve, t_target, n, k, eta):
    """Rows of ``(K - i eta S)`` for targets on the curve carrying the density.

    Targets ``t_target`` may coincide with nodes (collocation) or not (trace
    evaluation off the nodes); the log singularity is integrated exactly
    against the trigonometric interpolant either way.
    """
    ts = 2 * np.pi * np.arange(n) / n
    collocation = t_target.shape == ts.shape and np.array_equal(t_target, ts)
    xs, dxs, _, speed, nvec = _curve_frame(curve, ts)
    xt, dxt, ddxt, speed_t, _ = _curve_frame(curve, t_target)

    dt = t_target[:, None] - ts[None, :]
    same = np.abs(np.sin(dt / 2)) < 1e-14
    diff = xt[:, None, :] - xs[None, :, :]
    r = np.where(same, 1.0, np.sqrt((diff ** 2).sum(-1)))
    logsin = np.log(np.where(same, 1.0, 4 * np.sin(dt / 2) ** 2))

    kr = k * r
    J0, J1 = j0(kr), j1(kr)
    H0, H1 = J0 + 1j * y0(kr), J1 + 1j * y1(kr)
    ndot = (diff * nvec[None, :, :]).sum(-1) / r  # n(s).(x(t)-x(s))/r

    # double layer (ik/4) H1 n.(x-y)/r; its log part is -(k/4pi) J1 n.(x-y)/r
    L = 0.25j * k * H1 * ndot
    L1 = -(k / (4 * np.pi)) * J1 * ndot
    L2 = L - L1 * logsin
    # single layer (i/4) H0 |x'|; its log part is -(1/4pi) J0 |x'|
    M = 0.25j * H0 * speed[None, :]
    M1 = -(1 / (4 * np.pi)) * J0 * speed[None, :]
    M2 = M - M1 * logsin
    if same.any():
        ti, sj = np.nonzero(same)
        st = speed_t[ti]
        curv = (dxt[ti, 1] * ddxt[ti, 0] - dxt[ti, 0] * ddxt[ti, 1]) / (4 * np.pi * st ** 2)
        L1[ti, sj] = 0.0
        L2[ti, sj] = curv
        M1[ti, sj] = -st / (4 * np.pi)
        M2[ti, sj] = st * (0.25j - EULER_GAMMA / (2 * np.pi)
                           - np.log(k ** 2 * st ** 2 / 4) / (4 * np.pi))

    R = _collocation_weights(n) if collocation else _log_weights(n, dt)
    h = 2 * np.pi / n
    return R * (L1 - 1j * eta * M1) + h * (L2 - 1j * eta * M2)


def _cross_rows(xt, curve, n, k, eta):
    """Smooth-kernel rows for targets off the source curve (trapezoid rule)."""
    ts = 2 * np.pi * np.arange(n) / n
    xs, _, _, speed, nvec = _curve_frame(curve, ts)
    unit = nvec / speed[:, None]
    dlp = green_normal_derivative(k, xt, xs, unit)
    slp = 0.25j * _h0(k * _dist(xt, xs))
    return (dlp - 1j * eta * slp) * (2 * np.pi / n * speed)[None, :]


@dataclass
class BiePanelization:
    """Nystrom discretization of the combined-field boundary equation.

    ``matrix`` maps densities at all nodes (obstacles stacked in order) to the
    exterior boundary trace ``(1/2 + K - i eta S) psi``.
    """

    k: float
    eta: float
    n: int
    curves: list
    nodes: np.ndarray
    normals: np.ndarray
    speed: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray
    condition: float
    _lu: tuple = None

    @property
    def size(self) -> int:
        return len(self.nodes)

    def layer_matrix(self, x) -> np.ndarray:
        """Evaluation matrix of ``(D - i eta S)`` at exterior points ``x``."""
        x = np.atleast_2d(x)
        dlp = green_normal_derivative(self.k, x, self.nodes, self.normals)
        slp = 0.25j * _h0(self.k * _dist(x, self.nodes))
        return (dlp - 1j * self.eta * slp) * self.weights[None, :]

    def solve(self, rhs) -> np.ndarray:
        if self._lu is None:
            self._lu = sla.lu_factor(self.matrix)
        return sla.lu_solve(self._lu, rhs)

    def trace(self, density, shift: float = 0.5):
        """Exterior boundary trace of the layer potential off the nodes.

        Evaluated at parameters ``t_j + shift * h`` on every curve, with the
        density continued by trigonometric interpolation. Returns the trace
        values and the target points.
        """
        n, h = self.n, 2 * np.pi / self.n
        t = h * (np.arange(n) + shift)
        density = np.asarray(density).reshape(self.size, -1)
        freq = np.fft.fftfreq(n, d=1.0 / n)
        phase = np.exp(1j * freq * shift * h)
        phase[n // 2] = 0.0  # ambiguous Nyquist mode; vanishes at half shifts
        out, pts = [], []
        for a, ca in enumerate(self.curves):
            sa = slice(a * n, (a + 1) * n)
            xt = ca.point(t)
            interp = np.fft.ifft(np.fft.fft(density[sa], axis=0) * phase[:, None], axis=0)
            val = 0.5 * interp + _self_rows(ca, t, n, self.k, self.eta) @ density[sa]
            for b, cb in enumerate(self.curves):
                if b != a:
                    sb = slice(b * n, (b + 1) * n)
                    val = val + _cross_rows(xt, cb, n, self.k, self.eta) @ density[sb]
            out.append(val)
            pts.append(xt)
        return np.concatenate(out), np.concatenate(pts)


def assemble_bie(obstacles, k: float, n: int = 128, eta: float | None = None) -> BiePanelization:
    """Assemble the boundary system at wavenumber ``k``.

    ``obstacles`` is a Scene or a sequence of BoundaryCurve; ``n`` nodes are
    used per curve. The LU factorization is computed on first solve.
    """
    if n % 2:
        raise ValueError("node count per curve must be even")
    if k <= 0:
        raise ValueError("wavenumber must be positive")
    curves = list(getattr(obstacles, "obstacles", obstacles))
    eta = float(k if eta is None else eta)
    h = 2 * np.pi / n

    if not curves:
        empty = np.zeros((0, 2))
        return BiePanelization(k=k, eta=eta, n=n, curves=[], nodes=empty, normals=empty,
                               speed=np.zeros(0), weights=np.zeros(0),
                               matrix=np.zeros((0, 0), complex), condition=1.0)

    ts = h * np.arange(n)
    frames = [_curve_frame(c, ts) for c in curves]
    nodes = np.concatenate([f[0] for f in frames])
    speed = np.concatenate([f[3] for f in frames])
    normals = np.concatenate([f[4] / f[3][:, None] for f in frames])
    size = n * len(curves)
    A = np.zeros((size, size), dtype=complex)
    for a, ca in enumerate(curves):
        sa = slice(a * n, (a + 1) * n)
        for b, cb in enumerate(curves):
            sb = slice(b * n, (b + 1) * n)
            if a == b:
                A[sa, sb] = 0.5 * np.eye(n) + _self_rows(ca, ts, n, k, eta)
            else:
                A[sa, sb] = _cross_rows(frames[a][0], cb, n, k, eta)
    cond = float(np.linalg.cond(A))
    log.debug("BIE k=%.4f size=%d cond=%.3e", k, size, cond)
    if not np.isfinite(cond) or cond > 1e12:
        raise np.linalg.LinAlgError(f"boundary system singular at k={k} (cond={cond:.3e})")
    return BiePanelization(k=k, eta=eta, n=n, curves=curves, nodes=nodes, normals=normals,
                           speed=speed, weights=h * speed, matrix=A, condition=cond)


@dataclass
class FrequencySolve:
    """Densities for point sources ``y`` at one wavenumber.

    ``scattered(x)`` and ``total(x)`` return arrays of shape ``(P, S)`` for
    ``P`` targets and ``S`` sources.
    """

    panel: BiePanelization
    sources: np.ndarray
    density: np.ndarray

    @property
    def k(self) -> float:
        return self.panel.k

    def scattered(self, x) -> np.ndarray:
        x = np.atleast_2d(x)
        if self.panel.size == 0:
            return np.zeros((len(x), len(self.sources)), dtype=complex)
        return self.panel.layer_matrix(x) @ self.density

    def total(self, x) -> np.ndarray:
        return self.scattered(x) + green(self.k, np.atleast_2d(x), self.sources)

    def boundary_residual(self) -> float:
        """Dirichlet residual ``max|u_scat + G|`` halfway between nodes,
        relative to ``max|G|`` on the boundary."""
        if self.panel.size == 0:
            return 0.0
        trace, pts = self.panel.trace(self.density)
        inc = green(self.k, pts, self.sources)
        return float(np.abs(trace + inc).max() / np.abs(inc).max())


def solve_point_source(panel: BiePanelization, y, obstacles=None) -> FrequencySolve:
    """Solve for the scattered field of point sources at ``y`` (shape ``(S, 2)``)."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if obstacles is not None:
        for curve in getattr(obstacles, "obstacles", obstacles):
            if curve.contains(y).any():
                raise ValueError("point source lies inside an obstacle")
    if panel.size == 0:
        return FrequencySolve(panel, y, np.zeros((0, len(y)), dtype=complex))
    rhs = -green(panel.k, panel.nodes, y)
    return FrequencySolve(panel, y, panel.solve(rhs))


class SeriesDivergence(RuntimeError):
    pass


def disk_oracle(center, radius: float, k: float, x, y, max_terms: int = 200, tol: float = 1e-14):
    """Separation-of-variables scattered field of a sound-soft disk.

    ``-(i/4) sum_n J_n(ka)/H_n(ka) H_n(k r_x) H_n(k r_y) exp(in(phi_x - phi_y))``,
    summed symmetrically in ``n`` until the terms fall below ``tol`` of the sum.
    ``x``, ``y``: arrays of shape ``(P, 2)``; returns shape ``(P,)`` (pairwise).
    """
    x = np.atleast_2d(np.asarray(x, float)) - np.asarray(center)
    y = np.atleast_2d(np.asarray(y, float)) - np.asarray(center)
    rx, ry = np.hypot(*x.T), np.hypot(*y.T)
    if np.any(rx < radius) or np.any(ry < radius):
        raise ValueError("points must lie outside the disk")
    dphi = np.arctan2(x[:, 1], x[:, 0]) - np.arctan2(y[:, 1], y[:, 0])
    ka = k * radius

    def coeff(m):
        return jv(m, ka) / hankel1(m, ka) * hankel1(m, k * rx) * hankel1(m, k * ry)

    total = coeff(0)
    for m in range(1, max_terms + 1):
        # H_{-m} = (-1)^m H_m and J_{-m} = (-1)^m J_m, so +m and -m terms pair up
        term = coeff(m) * 2 * np.cos(m * dphi)
        total = total + term
        if m > ka and np.all(np.abs(term) <= tol * np.abs(total)):
            return -0.25j * total
    raise SeriesDivergence(f"disk series did not converge in {max_terms} terms")
