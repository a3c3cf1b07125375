"""Finite point clouds as approximations of compact sets."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import InputError
from .spaces import (
    SpaceModel,
    ambient_coordinates,
    TWO_PI,
    canonicalize_array,
    surrogate,
    surrogate_to_distance,
)

_CHUNK = 2_000_000  # surrogate matrix entries per brute-force block
_TREE_K = 4


@dataclass(frozen=True, eq=False)
class PointCloud:
    """A nonempty, deduplicated, lexicographically sorted set of points.

    ``resolution`` is the last decimation step applied, or ``None`` when the
    points are exact.
    """

    space: SpaceModel
    points: np.ndarray
    resolution: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.space.coord_dim:
            raise InputError(
                f"points must have shape (n, {self.space.coord_dim}), got {pts.shape}")
        if len(pts) == 0:
            raise InputError("point clouds must be nonempty")
        pts = _unique_rows(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, space: SpaceModel, X, resolution=None) -> "PointCloud":
        """Canonicalize raw coordinates and build a cloud."""
        return cls(space, canonicalize_array(space, X), resolution)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, PointCloud):
            return NotImplemented
        return (self.space == other.space and self.points.shape == other.points.shape
                and bool(np.array_equal(self.points, other.points)))

    __hash__ = None

    def __contains__(self, p) -> bool:
        row = np.asarray(p, dtype=float).reshape(1, -1)
        return bool(np.any(np.all(self.points == row, axis=1)))

    def issubset(self, other: "PointCloud") -> bool:
        _same_space(self, other)
        both = np.unique(np.vstack((self.points, other.points)), axis=0)
        return len(both) == len(other.points)

    def tuples(self) -> list:
        return [tuple(float(c) for c in row) for row in self.points]


def _unique_rows(X: np.ndarray) -> np.ndarray:
    """Lexicographically sorted distinct rows (faster than ``np.unique(axis=0)``
    for wide points)."""
    if len(X) == 1:
        return X.copy()
    X = X + 0.0  # -0.0 and 0.0 are one coordinate
    order = np.lexsort(X.T[::-1])
    X = X[order]
    keep = np.ones(len(X), dtype=bool)
    keep[1:] = np.any(X[1:] != X[:-1], axis=1)
    return X[keep]


def _same_space(A: PointCloud, B: PointCloud):
    if A.space != B.space:
        raise InputError(f"space mismatch: {A.space.descriptor} vs {B.space.descriptor}")


# -- Hausdorff distance --------------------------------------------------------

def _nearest_brute(space, X, Y) -> np.ndarray:
    rows = max(1, _CHUNK // max(1, len(Y)))
    out = np.empty(len(X))
    for start in range(0, len(X), rows):
        block = X[start:start + rows]
        out[start:start + rows] = surrogate(space, block[:, None, :], Y[None, :, :]).min(axis=1)
    return out


def _nearest_tree(space, X, Y) -> np.ndarray:
    """Nearest-neighbour surrogates of each row of X in Y.

    The tree only proposes candidates; the returned values are recomputed
    with :func:`surrogate`.  Rows whose candidate list might miss the exact
    minimizer (near ties) are retried with a longer list, then brute force.
    """
    aY = ambient_coordinates(space, Y)
    if space.kind == "projective2":
        # both representatives of every line, so one query finds the nearer one
        aY = np.vstack((aY, -aY))
    tree = cKDTree(aY)
    out = np.empty(len(X))
    rows = np.arange(len(X))
    k = _TREE_K
    while len(rows):
        k = min(k, len(aY))
        Xr = X[rows]
        dist, idx = tree.query(ambient_coordinates(space, Xr), k=k)
        dist = dist.reshape(len(Xr), k)
        idx = idx.reshape(len(Xr), k) % len(Y)
        out[rows] = surrogate(space, Xr[:, None, :], Y[idx]).min(axis=1)
        if k == len(aY):
            break
        # points outside the candidate list are at least as far as its last entry
        unsure = dist[:, -1] <= dist[:, 0] * (1.0 + 1e-9) + 1e-12
        rows = rows[unsure]
        if k >= 256 and len(rows):
            out[rows] = _nearest_brute(space, X[rows], Y)
            break
        k *= 8
    return out


def directed_surrogate(A: PointCloud, B: PointCloud, method: str = "auto") -> float:
    _same_space(A, B)
    X, Y = A.points, B.points
    if method == "auto":
        method = "tree" if len(X) * len(Y) > 250_000 and len(Y) > _TREE_K else "brute"
    if method == "brute":
        near = _nearest_brute(A.space, X, Y)
    elif method == "tree":
        near = _nearest_tree(A.space, X, Y)
    else:
        raise InputError(f"unknown method {method!r}")
    return float(np.max(near))


def directed_hausdorff(A: PointCloud, B: PointCloud, method: str = "auto") -> float:
    """``max_{a in A} min_{b in B} d(a, b)``."""
    return surrogate_to_distance(A.space, directed_surrogate(A, B, method))


def hausdorff(A: PointCloud, B: PointCloud, method: str = "auto") -> float:
    """Hausdorff distance between two clouds.

    ``method`` is ``"brute"`` (exact O(|A||B|) scan), ``"tree"`` (k-d tree
    candidate search, returning the identical value) or ``"auto"``.
    """
    _same_space(A, B)
    s = max(directed_surrogate(A, B, method), directed_surrogate(B, A, method))
    return surrogate_to_distance(A.space, s)


def distance_to_point(A: PointCloud, p) -> float:
    """Distance from ``p`` to the nearest point of ``A``."""
    P = PointCloud.from_points(A.space, np.asarray(p, dtype=float).reshape(1, -1))
    return directed_hausdorff(P, A)


# -- decimation and algebra ----------------------------------------------------

def snap(X: np.ndarray, eps: float) -> np.ndarray:
    """Round every coordinate to the nearest multiple of ``eps``, halves away from zero."""
    q = np.floor(np.abs(X) / eps + 0.5)
    return np.copysign(q, X) * eps + 0.0


def decimate(S: PointCloud, eps: float) -> PointCloud:
    """Snap a cloud to the ``eps`` grid and deduplicate.

    The result is within ``eps * sqrt(k) / 2`` of ``S`` for points with ``k``
    coordinates.  Projective points are snapped in the representative scaled
    to unit maximum coordinate, then re-normalized (see ``_snap_projective``).
    """
    if not eps > 0 or not math.isfinite(eps):
        raise InputError(f"decimation resolution must be positive, got {eps!r}")
    kind = S.space.kind
    if kind == "projective2":
        X = _snap_projective(S.points, eps)
    elif kind == "circle":
        X = snap(S.points, eps)
        # the top grid point may reach 2*pi; it is identified with 0
        X = np.where(X >= TWO_PI, 0.0, X)
    else:
        X = snap(S.points, eps)
    return PointCloud(S.space, canonicalize_array(S.space, X), float(eps))


def _snap_projective(P: np.ndarray, eps: float) -> np.ndarray:
    """Snap lines through the representative whose largest coordinate is +-1.

    The largest coordinate stays exactly +-1 and the others are snapped to the
    grid and clamped to [-1, 1].  Re-normalizing and snapping again lands on
    the same grid vector, so decimation is idempotent, and the moved
    representative has length at least 1, so the angle moved is at most
    ``eps * sqrt(2) / 2``.
    """
    n = len(P)
    rows = np.arange(n)
    lead = np.argmax(np.abs(P), axis=1)
    W = P / np.abs(P[rows, lead])[:, None]
    W = np.clip(snap(W, eps), -1.0, 1.0)
    W[rows, lead] = np.sign(P[rows, lead])
    return W


def union(A: PointCloud, B: PointCloud) -> PointCloud:
    _same_space(A, B)
    res = A.resolution if A.resolution == B.resolution else None
    return PointCloud(A.space, np.vstack((A.points, B.points)), res)


# -- text interchange ------------------------------------------------------------

CLOUD_MAGIC = "# chaoscope cloud v1"


def format_cloud(S: PointCloud) -> str:
    res = "exact" if S.resolution is None else repr(float(S.resolution))
    lines = [
        CLOUD_MAGIC,
        f"space: {S.space.descriptor}",
        f"resolution: {res}",
        f"count: {len(S)}",
    ]
    lines.extend(" ".join(repr(float(c)) for c in row) for row in S.points)
    return "\n".join(lines) + "\n"


def write_cloud(S: PointCloud, path) -> None:
    Path(path).write_text(format_cloud(S))


def parse_cloud(text: str, source: str = "cloud") -> PointCloud:
    from .exceptions import ConfigError

    lines = text.splitlines()
    if not lines or lines[0].strip() != CLOUD_MAGIC:
        raise ConfigError("missing cloud header", 1, source)
    header = {}
    i = 1
    while i < len(lines) and ":" in lines[i] and len(header) < 3:
        key, _, value = lines[i].partition(":")
        header[key.strip()] = value.strip()
        i += 1
    for key in ("space", "resolution", "count"):
        if key not in header:
            raise ConfigError(f"missing header field {key!r}", i + 1, source)
    try:
        space = SpaceModel.parse(header["space"])
        res = None if header["resolution"] == "exact" else float(header["resolution"])
        count = int(header["count"])
    except (InputError, ValueError) as exc:
        raise ConfigError(str(exc), i, source) from None
    rows = []
    for lineno, line in enumerate(lines[i:], start=i + 1):
        if not line.strip():
            continue
        try:
            row = [float(v) for v in line.split()]
        except ValueError:
            raise ConfigError(f"bad coordinate line {line!r}", lineno, source) from None
        if len(row) != space.coord_dim:
            raise ConfigError(f"expected {space.coord_dim} coordinates", lineno, source)
        rows.append(row)
    if len(rows) != count:
        raise ConfigError(f"header says {count} points, found {len(rows)}", len(lines), source)
    if not rows:
        raise ConfigError("cloud has no points", len(lines), source)
    return PointCloud(space, np.array(rows, dtype=float), res)


def read_cloud(path) -> PointCloud:
    return parse_cloud(Path(path).read_text(), str(path))
