"""Passive correlation kernel from total-field records.

For records ``u(n dt)``, ``n = 0..2N``, the correlation at even lags is

    phi(2n' dt, x, y; z) = sum_{n=n1}^{n2} u(n dt, y; z) u((2n' + n) dt, x; z) dt

with ``n1 = max(0, -2n')``, ``n2 = min(2N, 2(N - n'))``. The kernel is the
source-summed, central-differenced correlation minus the incident
correlation terms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SCALINGS = ("consistent", "literal")


def _check(ux, uy):
    ux, uy = np.asarray(ux, float), np.asarray(uy, float)
    if ux.ndim != 3 or uy.ndim != 3:
        raise ValueError("records must be (time, point, source) arrays")
    if ux.shape[0] != uy.shape[0] or ux.shape[2] != uy.shape[2]:
        raise ValueError(f"record grids differ: {ux.shape} vs {uy.shape}")
    if ux.shape[0] % 2 != 1:
        raise ValueError("records need 2N+1 time samples")
    return ux, uy


def correlate_direct(ux, uy, dt: float, reduce: bool = False) -> np.ndarray:
    """Literal double sum. Output ``(2N+1, J, M, L)`` or, with ``reduce``,
    summed over sources in index order: ``(2N+1, J, M)``."""
    ux, uy = _check(ux, uy)
    n_t, J, L = ux.shape
    M = uy.shape[1]
    N = (n_t - 1) // 2
    shape = (2 * N + 1, J, M) if reduce else (2 * N + 1, J, M, L)
    out = np.zeros(shape)
    for i, lag in enumerate(range(-N, N + 1)):
        n1, n2 = max(0, -2 * lag), min(2 * N, 2 * (N - lag))
        if n1 > n2:
            continue
        a = uy[n1:n2 + 1]
        b = ux[n1 + 2 * lag:n2 + 2 * lag + 1]
        if reduce:
            out[i] = np.einsum("njl,nml->jm", b, a) * dt
        else:
            out[i] = np.einsum("njl,nml->jml", b, a) * dt
    return out


def correlate_fft(ux, uy, dt: float, reduce: bool = False) -> np.ndarray:
    """Same values as :func:`correlate_direct` via zero-padded FFTs."""
    ux, uy = _check(ux, uy)
    n_t = ux.shape[0]
    N = (n_t - 1) // 2
    nfft = 1 << int(np.ceil(np.log2(2 * n_t)))
    X = np.fft.rfft(ux, nfft, axis=0)
    Y = np.conj(np.fft.rfft(uy, nfft, axis=0))
    if reduce:
        spec = np.einsum("fjl,fml->fjm", X, Y)
    else:
        spec = X[:, :, None, :] * Y[:, None, :, :]
    full = np.fft.irfft(spec, nfft, axis=0)
    lags = 2 * np.arange(-N, N + 1)
    return full[lags % nfft] * dt


@dataclass
class CrossCorrelation:
    """``phi`` on lags ``2n' dt``, ``n' = -N..N``; ``source_summed`` if reduced over ``l``."""

    values: np.ndarray
    dt: float
    source_summed: bool

    @property
    def N(self) -> int:
        return (self.values.shape[0] - 1) // 2

    def padded(self) -> np.ndarray:
        """Values with the zero lags ``+-(N+1)`` appended at both ends."""
        pad = [(1, 1)] + [(0, 0)] * (self.values.ndim - 1)
        return np.pad(self.values, pad)


def cross_correlate(passive_x, passive_y, dt: float, method: str = "fft",
                    reduce: bool = True) -> CrossCorrelation:
    if method == "fft":
        vals = correlate_fft(passive_x, passive_y, dt, reduce)
    elif method == "direct":
        vals = correlate_direct(passive_x, passive_y, dt, reduce)
    else:
        raise ValueError(f"unknown correlation method {method!r}")
    return CrossCorrelation(vals, float(dt), reduce)


@dataclass
class CorrelationKernel:
    """``c(2n' dt, x_j; y_m)`` for ``n' = -N..N``, shape ``(2N+1, J, M)``."""

    values: np.ndarray
    dt: float
    scaling: str
    correlation_part: np.ndarray

    @property
    def N(self) -> int:
        return (self.values.shape[0] - 1) // 2


def scaling_factor(scaling: str, dt: float) -> float:
    """Extra factor on the correlation part relative to ``-(pi R / L)``.

    ``"consistent"`` divides by ``dt``: the lag spacing of the central
    difference is ``4 dt`` and the remaining constants ``-2 * 2 pi R / L``
    combine with it to ``-pi R / (L dt)``. ``"literal"`` omits it.
    """
    if scaling == "consistent":
        return 1.0 / dt
    if scaling == "literal":
        return 1.0
    raise ValueError(f"unknown kernel scaling {scaling!r}; expected one of {SCALINGS}")


def assemble_kernel(correlation: CrossCorrelation, incident, R: float, L: int,
                    scaling: str = "consistent") -> CorrelationKernel:
    """Kernel from a correlation and ``Phi_chi~`` on the lag grid ``(2N+1, J, M)``."""
    phi = correlation.values if correlation.source_summed else correlation.values.sum(axis=-1)
    if not correlation.source_summed and correlation.values.shape[-1] != L:
        raise ValueError(f"correlation holds {correlation.values.shape[-1]} sources, expected {L}")
    incident = np.asarray(incident, float)
    if incident.shape != phi.shape:
        raise ValueError(f"incident terms {incident.shape} do not match correlation {phi.shape}")
    padded = np.pad(phi, [(1, 1), (0, 0), (0, 0)])
    diff = padded[2:] - padded[:-2]
    corr = -(np.pi * R / L) * scaling_factor(scaling, correlation.dt) * diff
    values = corr - incident + incident[::-1]
    return CorrelationKernel(values=values, dt=correlation.dt, scaling=scaling,
                             correlation_part=corr)


def passive_kernel(passive_x, passive_y, incident, dt: float, R: float, L: int,
                   scaling: str = "consistent", method: str = "fft") -> CorrelationKernel:
    """Records to kernel in one call."""
    corr = cross_correlate(passive_x, passive_y, dt, method=method, reduce=True)
    return assemble_kernel(corr, incident, R, L, scaling)
