"""Minimal rendering of indicator maps: binary PGM heatmaps and CSV tables."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class HeatmapImage:
    """8-bit grayscale image, row 0 at the top (largest ``y``).

    ``transform`` maps world to pixel coordinates:
    ``col = a * x + b``, ``row = c * y + d`` stored as ``(a, b, c, d)``.
    ``overlay`` is an optional ``(n, 2)`` polyline in world coordinates.
    """

    pixels: np.ndarray
    transform: tuple
    overlay: list = field(default_factory=list)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def world_to_pixel(self, pts) -> np.ndarray:
        a, b, c, d = self.transform
        pts = np.atleast_2d(pts)
        return np.stack([c * pts[:, 1] + d, a * pts[:, 0] + b], axis=-1)

    def burned(self, value: int = 255) -> np.ndarray:
        """Pixels with the overlay polylines drawn in."""
        img = self.pixels.copy()
        for line in self.overlay:
            # densify so every crossed cell is hit
            line = np.asarray(line, float)
            seg = np.concatenate([np.linspace(p, q, 16, endpoint=False)
                                  for p, q in zip(line[:-1], line[1:])] + [line[-1:]])
            rc = np.rint(self.world_to_pixel(seg)).astype(int)
            ok = (rc[:, 0] >= 0) & (rc[:, 0] < self.height) & (rc[:, 1] >= 0) & (rc[:, 1] < self.width)
            img[rc[ok, 0], rc[ok, 1]] = value
        return img

    def to_pgm(self, burn_overlay: bool = False) -> bytes:
        img = self.burned() if burn_overlay and self.overlay else self.pixels
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def heatmap(values, grid, mask=None, overlay=None) -> HeatmapImage:
    """Quantize ``round(255 I / max I)`` on unmasked cells; masked cells are 0."""
    values = np.asarray(values, float)
    mask = grid.mask if mask is None else mask
    finite = mask & np.isfinite(values)
    vmax = values[finite].max() if finite.any() else 0.0
    px = np.zeros(values.shape, dtype=np.uint8)
    if vmax > 0:
        px[finite] = np.rint(255.0 * np.clip(values[finite], 0, None) / vmax).astype(np.uint8)
    px[mask & np.isposinf(values)] = 255
    h = grid.spacing
    transform = (1.0 / h, -grid.xs[0] / h, -1.0 / h, grid.ys[-1] / h)
    return HeatmapImage(pixels=px[::-1].copy(), transform=transform,
                        overlay=[np.asarray(o, float) for o in (overlay or [])])


def read_pgm(data: bytes) -> np.ndarray:
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError("only 8-bit PGM is supported")
    return np.frombuffer(parts[4][:w * h], dtype=np.uint8).reshape(h, w)


def write_pgm(path, image: HeatmapImage, burn_overlay: bool = False):
    Path(path).write_bytes(image.to_pgm(burn_overlay))


def write_csv(path, values, grid, mask=None):
    """Rows ``x,y,value`` for unmasked grid points, ``y`` major then ``x``."""
    mask = grid.mask if mask is None else mask
    pts = grid.points
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "value"])
        for iy, ix in zip(*np.nonzero(mask)):
            x, y = pts[iy, ix]
            w.writerow([repr(float(x)), repr(float(y)), repr(float(values[iy, ix]))])


def read_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
