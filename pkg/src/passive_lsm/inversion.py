"""Truncated-SVD sampling solves and indicator maps."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .operators import ImagingOperator, test_function_values

log = logging.getLogger(__name__)

DEFAULT_RATIO = 0.005


@dataclass
class TruncatedSvd:
    """Leading singular triples with ``s_p / s_1 >= ratio``."""

    U: np.ndarray
    s: np.ndarray
    Vt: np.ndarray
    ratio: float
    kind: str = ""
    s_all: np.ndarray = field(default=None, repr=False)

    @property
    def P(self) -> int:
        return self.s.size

    def apply_pinv(self, rhs) -> np.ndarray:
        """``V_P S_P^{-1} U_P^T rhs`` (columns of ``rhs`` are right-hand sides)."""
        return self.Vt.T @ ((self.U.T @ rhs) / self._col(self.s))

    @staticmethod
    def _col(s):
        return s[:, None]


def truncated_svd(operator, ratio: float = DEFAULT_RATIO) -> TruncatedSvd:
    """Full dense SVD, keeping exactly the singular values with ``s / s_1 >= ratio``."""
    if not 0 < ratio <= 1:
        raise ValueError("ratio must lie in (0, 1]")
    A = operator.matrix if isinstance(operator, ImagingOperator) else np.asarray(operator, float)
    kind = operator.kind if isinstance(operator, ImagingOperator) else ""
    try:
        U, s, Vt = sla.svd(A, full_matrices=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        U, s, Vt = sla.svd(A, full_matrices=False, lapack_driver="gesvd")
    if s.size == 0 or s[0] == 0:
        raise ValueError("cannot truncate the SVD of a zero operator")
    P = int(np.count_nonzero(s / s[0] >= ratio))
    log.info("SVD %s: %d of %d singular values kept (ratio %.3g)", kind, P, s.size, ratio)
    return TruncatedSvd(U=np.ascontiguousarray(U[:, :P]), s=s[:P].copy(),
                        Vt=np.ascontiguousarray(Vt[:P]), ratio=ratio, kind=kind, s_all=s)


@dataclass
class SampleSolution:
    g: np.ndarray
    indicator: float
    degenerate: bool


def solve_sample(svd: TruncatedSvd, rhs) -> SampleSolution:
    """Truncated solution ``g`` for one flattened test function and ``1/||g||``.

    A test function orthogonal to the kept range gives ``g = 0``; its
    indicator is reported as ``inf`` with ``degenerate=True``.
    """
    rhs = np.asarray(rhs, float).reshape(-1)
    if rhs.size != svd.U.shape[0]:
        raise ValueError(f"test function has {rhs.size} entries, operator has {svd.U.shape[0]} rows")
    g = svd.apply_pinv(rhs[:, None])[:, 0]
    norm = np.linalg.norm(g)
    if norm == 0:
        return SampleSolution(g, np.inf, True)
    return SampleSolution(g, 1.0 / norm, False)


@dataclass
class IndicatorMap:
    """``1/||g_z||`` on a sampling grid; masked points hold exactly 0."""

    values: np.ndarray
    grid: object
    kind: str
    max_value: float

    @property
    def normalized(self) -> np.ndarray:
        return self.values / self.max_value if self.max_value > 0 else self.values.copy()

    def argmax_point(self) -> np.ndarray:
        idx = np.unravel_index(np.argmax(self.values), self.values.shape)
        return self.grid.points[idx]


def indicator_values(svd: TruncatedSvd, points, tau: float, autocorr, receivers, lag_times,
                     amplitude: str = "3d", chunk: int = 256) -> np.ndarray:
    """Indicator at each sampling point; rows of the test function are ``k * J + j``.

    Uses ``||V_P y|| = ||y||`` for the orthonormal columns of ``V_P``.
    """
    points = np.atleast_2d(points)
    out = np.empty(len(points))
    for start in range(0, len(points), chunk):
        z = points[start:start + chunk]
        phi = test_function_values(z, tau, autocorr, receivers, lag_times, amplitude)
        rhs = phi.reshape(len(z), -1).T
        coef = (svd.U.T @ rhs) / svd.s[:, None]
        norm = np.sqrt((coef ** 2).sum(axis=0))
        with np.errstate(divide="ignore"):
            out[start:start + chunk] = np.where(norm > 0, 1.0 / norm, np.inf)
    return out


def indicator_map(svd: TruncatedSvd, grid, tau: float, autocorr, receivers, lag_times,
                  amplitude: str = "3d") -> IndicatorMap:
    values = np.zeros(grid.shape)
    mask = grid.mask
    if mask.any():
        values[mask] = indicator_values(svd, grid.points[mask], tau, autocorr, receivers,
                                        lag_times, amplitude)
    finite = values[np.isfinite(values)]
    vmax = float(finite.max()) if finite.size else 0.0
    return IndicatorMap(values=values, grid=grid, kind=svd.kind, max_value=vmax)


def contrast_ratio(normalized, points, scene, gap: float = 0.5) -> float:
    """Mean over points inside the obstacles / mean over points farther than ``gap`` outside."""
    normalized = np.asarray(normalized, float)
    inside = scene.inside(points)
    far = ~inside & (scene.distance_to_obstacles(points) > gap)
    if not inside.any() or not far.any():
        return float("nan")
    return float(normalized[inside].mean() / normalized[far].mean())


def level_set_components(indicator: IndicatorMap, level: float = 0.75):
    """Connected components (4-neighbour) of ``{I / max I >= level}`` inside the mask.

    Returns the label array and the number of components.
    """
    from scipy import ndimage

    sel = (indicator.normalized >= level) & indicator.grid.mask
    return ndimage.label(sel)


def map_summary(indicator: IndicatorMap, scene=None, gap: float = 0.5) -> dict:
    am = indicator.argmax_point()
    out = {"kind": indicator.kind, "max_value": indicator.max_value,
           "argmax": [float(am[0]), float(am[1])]}
    if scene is not None and scene.obstacles:
        mask = indicator.grid.mask
        pts = indicator.grid.points[mask]
        out["argmax_inside"] = bool(scene.inside(am[None])[0])
        out["contrast"] = contrast_ratio(indicator.normalized[mask], pts, scene, gap)
    return out
