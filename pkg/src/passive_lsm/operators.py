"""Discrete imaging operators and monopole test functions.

Matrices act on densities ``g(2h dt, y_m)`` flattened as ``h * M + m`` and
return values at ``(2k dt, x_j)`` flattened as ``k * J + j``, with
``k, h = -n_op..n_op``. Entries are

    A[(k, j), (h, m)] = 2 K(2(k - h) dt, x_j; y_m) dt dy

for ``|k - h| <= n_op`` and zero otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPERATOR_KINDS = ("C", "I", "N")


@dataclass
class ImagingOperator:
    matrix: np.ndarray
    kind: str
    n_op: int
    J: int
    M: int
    dt: float
    dy: float

    @property
    def shape(self):
        return self.matrix.shape

    def scaled(self, alpha: float) -> "ImagingOperator":
        return ImagingOperator(alpha * self.matrix, self.kind, self.n_op, self.J, self.M,
                               self.dt, self.dy)


def kernel_window(kernel, n_op: int | None = None) -> np.ndarray:
    """Central ``2 n_op + 1`` lags of a ``(2N+1, J, M)`` kernel."""
    kernel = np.asarray(kernel, float)
    if kernel.ndim != 3 or kernel.shape[0] % 2 != 1:
        raise ValueError(f"kernel must be (2N+1, J, M), got {kernel.shape}")
    N = (kernel.shape[0] - 1) // 2
    n_op = N if n_op is None else int(n_op)
    if n_op > N:
        raise ValueError(f"kernel covers lags up to {N}, operator needs {n_op}")
    return kernel[N - n_op:N + n_op + 1]


def antisymmetrize(kernel) -> np.ndarray:
    """``K(t) - K(-t)`` on a lag grid symmetric about zero."""
    kernel = np.asarray(kernel, float)
    return kernel - kernel[::-1]


def toeplitz_assemble(kernel, dt: float, dy: float) -> np.ndarray:
    """Block-Toeplitz matrix from lags ``-n..n`` (out-of-range lags are zero)."""
    kernel = np.asarray(kernel, float)
    n_lag, J, M = kernel.shape
    n = (n_lag - 1) // 2
    size = 2 * n + 1
    padded = np.zeros((4 * n + 1, J, M))
    padded[n:3 * n + 1] = kernel  # padded[d + 2n] = K(d), d = -2n..2n
    k = np.arange(size)
    blocks = padded[k[:, None] - k[None, :] + 2 * n]  # (k, h, J, M)
    return (2 * dt * dy) * blocks.transpose(0, 2, 1, 3).reshape(size * J, size * M)


def default_dy(scene) -> float:
    """Arclength weight of one source-test point on the measurement ring."""
    return 2 * np.pi * scene.measurement_radius / scene.M


def assemble_operator(kernel, kind: str, dt: float, dy: float, n_op: int | None = None
                      ) -> ImagingOperator:
    """Build ``C`` (from the passive kernel ``c``), ``N`` or ``I`` (from ``u_scat_chi~``)."""
    if kind not in OPERATOR_KINDS:
        raise ValueError(f"unknown operator kind {kind!r}; expected one of {OPERATOR_KINDS}")
    if dy <= 0:
        raise ValueError("dy must be positive")
    K = kernel_window(kernel, n_op)
    n = (K.shape[0] - 1) // 2
    op = ImagingOperator(toeplitz_assemble(K, dt, dy), kind, n, K.shape[1], K.shape[2],
                         float(dt), float(dy))
    if kind == "I":
        # N minus its time flip: the antisymmetrized kernel, entrywise
        op.matrix = op.matrix - flip_time(op)
    return op


def flip_time(op: ImagingOperator) -> np.ndarray:
    """Matrix with the lag sign reversed: entries ``K(2(h - k) dt)``."""
    size = 2 * op.n_op + 1
    A = op.matrix.reshape(size, op.J, size, op.M)
    return A[::-1, :, ::-1, :].reshape(op.matrix.shape)


@dataclass
class TestFunction:
    values: np.ndarray  # (2 n_op + 1, J)
    z: np.ndarray
    tau: float

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


def test_function_values(z, tau: float, autocorr, receivers, lag_times, amplitude: str = "3d"):
    """``chi~(t_k - tau - |x_j - z|) / (4 pi |x_j - z|)`` for many ``z`` at once.

    ``z``: ``(Z, 2)``; returns ``(Z, len(lag_times), J)``. ``amplitude="2d"``
    swaps the spherical spreading factor for the planar far-field one
    ``1 / sqrt(8 pi k_c r)`` with ``k_c = 4``.
    """
    z = np.atleast_2d(np.asarray(z, float))
    receivers = np.atleast_2d(receivers)
    r = np.sqrt(((receivers[None, :, :] - z[:, None, :]) ** 2).sum(-1))  # (Z, J)
    if np.any(r == 0):
        raise ValueError("sampling point coincides with a receiver")
    if amplitude == "3d":
        amp = 1.0 / (4 * np.pi * r)
    elif amplitude == "2d":
        amp = 1.0 / np.sqrt(8 * np.pi * 4.0 * r)
    else:
        raise ValueError(f"unknown amplitude model {amplitude!r}")
    t = np.asarray(lag_times, float)[None, :, None] - tau - r[:, None, :]
    return autocorr(t) * amp[:, None, :]


def test_function(z, tau: float, autocorr, receivers, lag_times, amplitude: str = "3d"
                  ) -> TestFunction:
    vals = test_function_values(np.asarray(z)[None], tau, autocorr, receivers, lag_times,
                                amplitude)[0]
    return TestFunction(vals, np.asarray(z, float), float(tau))


# keep pytest from collecting these when imported into test modules
TestFunction.__test__ = False
test_function.__test__ = False
test_function_values.__test__ = False
