"""Rasterize point clouds into 8-bit grayscale images and write PGM files."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import InputError
from .sets import PointCloud
from .spaces import CHART_THRESHOLD, chart_project_array

PERCENTILES = (1.0, 99.0)
MARGIN = 0.05


@dataclass(frozen=True)
class Viewport:
    xrange: tuple = (0.0, 1.0)
    yrange: tuple = (0.0, 1.0)
    width: int = 512
    height: int = 512
    autoscale: bool = False

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InputError("image dimensions must be at least 1 pixel")
        if not self.autoscale:
            for lo, hi in (self.xrange, self.yrange):
                if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
                    raise InputError(f"degenerate viewport range ({lo}, {hi})")

    def fitted(self, xy: np.ndarray) -> "Viewport":
        """Ranges from the 1st-99th percentile box of ``xy``, widened by 5% per side."""
        if not self.autoscale:
            return self
        if len(xy) == 0:
            return Viewport((-1.0, 1.0), (-1.0, 1.0), self.width, self.height)
        ranges = []
        for col in (xy[:, 0], xy[:, 1]):
            lo, hi = np.percentile(col, PERCENTILES)
            span = hi - lo
            pad = MARGIN * span if span > 0 else 0.5
            ranges.append((float(lo - pad), float(hi + pad)))
        return Viewport(ranges[0], ranges[1], self.width, self.height)


@dataclass(frozen=True, eq=False)
class ImageGrid:
    pixels: np.ndarray  # (height, width) uint8, row 0 at the top

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        return isinstance(other, ImageGrid) and np.array_equal(self.pixels, other.pixels)

    __hash__ = None

    @property
    def dark_pixels(self) -> int:
        return int(np.count_nonzero(self.pixels < 255))


def plane_coordinates(S: PointCloud, chart_threshold: float = CHART_THRESHOLD) -> np.ndarray:
    """2-d drawing coordinates for a cloud."""
    kind, pts = S.space.kind, S.points
    if kind == "euclidean" and S.space.dim == 2:
        return np.asarray(pts, dtype=float)
    if kind == "projective2":
        return chart_project_array(pts, chart_threshold)
    if kind == "circle":
        return np.column_stack((np.sin(pts[:, 0]), np.cos(pts[:, 0])))
    raise InputError(f"cannot draw points of {S.space.descriptor}")


def rasterize_xy(xy: np.ndarray, vp: Viewport) -> ImageGrid:
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    vp = vp.fitted(xy)
    (x0, x1), (y0, y1) = vp.xrange, vp.yrange
    col = np.floor((xy[:, 0] - x0) / (x1 - x0) * vp.width)
    row = np.floor((y1 - xy[:, 1]) / (y1 - y0) * vp.height)
    inside = (col >= 0) & (col < vp.width) & (row >= 0) & (row < vp.height)
    hits = np.zeros((vp.height, vp.width), dtype=np.int64)
    np.add.at(hits, (row[inside].astype(np.int64), col[inside].astype(np.int64)), 1)
    top = int(hits.max())
    if top == 0:
        warnings.warn("no points inside the viewport; image is blank", stacklevel=2)
        return ImageGrid(np.full((vp.height, vp.width), 255, dtype=np.uint8))
    shade = np.floor(255.0 * np.log1p(hits) / math.log1p(top) + 0.5)
    return ImageGrid((255 - np.minimum(255, shade)).astype(np.uint8))


def rasterize(S: PointCloud, vp: Viewport, chart_threshold: float = CHART_THRESHOLD) -> ImageGrid:
    """Draw a cloud: hit pixels are darkened by log-scaled hit counts on white.

    Projective clouds go through the ``z = 1`` chart, dropping points near the
    line at infinity; circle points are drawn on the unit circle with angle 0
    at the top.
    """
    return rasterize_xy(plane_coordinates(S, chart_threshold), vp)


def pgm_bytes(img: ImageGrid, ascii: bool = False) -> bytes:
    h, w = img.pixels.shape
    if ascii:
        rows = "\n".join(" ".join(str(int(v)) for v in r) for r in img.pixels)
        return f"P2\n{w} {h}\n255\n".encode("ascii") + rows.encode("ascii") + b"\n"
    return f"P5\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(img.pixels, dtype=np.uint8).tobytes()


def write_pgm(img: ImageGrid, path, ascii: bool = False) -> None:
    try:
        Path(path).write_bytes(pgm_bytes(img, ascii))
    except OSError as exc:
        raise OSError(f"cannot write PGM image to {path}: {exc.strerror or exc}") from exc


def read_pgm(path) -> ImageGrid:
    """Read a binary P5 file as written by :func:`write_pgm`."""
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if len(parts) < 4 or parts[0] != b"P5" or parts[2] != b"255":
        raise InputError(f"{path} is not an 8-bit binary PGM")
    w, h = (int(v) for v in parts[1].split())
    raster = np.frombuffer(parts[3], dtype=np.uint8)
    if raster.size != w * h:
        raise InputError(f"{path}: expected {w * h} raster bytes, found {raster.size}")
    return ImageGrid(raster.reshape(h, w).copy())
