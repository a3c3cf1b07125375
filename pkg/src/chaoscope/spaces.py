"""Space models, canonical point forms and metrics.

Four concrete metric spaces are supported:

* ``euclidean(d)``: points are ``d`` real coordinates.
* ``circle``: one angle in ``[0, 2*pi)``; the metric is arc length.
* ``projective2``: lines through the origin of R^3, stored as unit
  triples whose first nonzero coordinate is positive.
* ``sequence(d)``: the first ``d`` coordinates of a square-summable
  sequence, with the Euclidean norm.

Points are plain tuples of floats.  Clouds of points are ``(n, k)`` float
arrays where ``k`` is :attr:`SpaceModel.coord_dim`.

All metric computations go through a *surrogate*: a quantity built from
additions and multiplications only, monotone in the true distance.  Nearest
neighbour searches compare surrogates and convert the final value once,
which keeps brute-force and accelerated searches bit-identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError

TWO_PI = 2.0 * math.pi
CHART_THRESHOLD = 1e-6
# a triple whose computed norm is this close to 1 is already a unit
# representative; dividing it again would only jitter the last bit
_UNIT_SLACK = 4.0 * 2.0**-52
_WIDE = 8  # coordinate count above which the metric sums by row reduction
DEFAULT_SEQUENCE_DIM = 256

_KINDS = ("euclidean", "circle", "projective2", "sequence")


@dataclass(frozen=True)
class SpaceModel:
    kind: str
    dim: int = 1

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"unknown space kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind == "circle" and self.dim != 1:
            raise InputError("circle has dimension 1")
        if self.kind == "projective2" and self.dim != 2:
            raise InputError("projective2 has dimension 2")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dimension must be a positive integer, got {self.dim!r}")

    @classmethod
    def euclidean(cls, d: int) -> "SpaceModel":
        return cls("euclidean", d)

    @classmethod
    def circle(cls) -> "SpaceModel":
        return cls("circle", 1)

    @classmethod
    def projective2(cls) -> "SpaceModel":
        return cls("projective2", 2)

    @classmethod
    def sequence(cls, d: int = DEFAULT_SEQUENCE_DIM) -> "SpaceModel":
        return cls("sequence", d)

    @property
    def coord_dim(self) -> int:
        """Length of the stored coordinate vector."""
        return 3 if self.kind == "projective2" else self.dim

    @property
    def descriptor(self) -> str:
        if self.kind in ("circle", "projective2"):
            return self.kind
        return f"{self.kind} {self.dim}"

    @classmethod
    def parse(cls, text: str) -> "SpaceModel":
        parts = text.split()
        if not parts:
            raise InputError("empty space descriptor")
        kind = parts[0]
        if kind in ("circle", "projective2"):
            if len(parts) != 1:
                raise InputError(f"{kind} takes no dimension")
            return cls.circle() if kind == "circle" else cls.projective2()
        if kind not in ("euclidean", "sequence") or len(parts) != 2:
            raise InputError(f"bad space descriptor {text!r}")
        try:
            d = int(parts[1])
        except ValueError:
            raise InputError(f"bad dimension in space descriptor {text!r}") from None
        return cls(kind, d)


def _check_arity(space: SpaceModel, n: int):
    if n != space.coord_dim:
        raise InputError(
            f"{space.descriptor} points have {space.coord_dim} coordinates, got {n}")


# -- canonical forms ---------------------------------------------------------

def wrap_angle(a: float) -> float:
    a = a % TWO_PI
    if a >= TWO_PI:
        a = 0.0
    return a + 0.0


def wrap_angles(a: np.ndarray) -> np.ndarray:
    a = np.remainder(a, TWO_PI)
    return np.where(a >= TWO_PI, 0.0, a) + 0.0


def normalize_projective(v0: float, v1: float, v2: float) -> tuple:
    """Unit representative with positive leading nonzero coordinate.

    Uses only correctly rounded operations so that :func:`normalize_projective_cols`
    yields bit-identical results on arrays.
    """
    n = math.sqrt(v0 * v0 + v1 * v1 + v2 * v2)
    if n == 0.0:
        raise InputError("the zero vector does not define a projective point")
    if abs(n - 1.0) <= _UNIT_SLACK:
        n = 1.0
    if v0 < 0 or (v0 == 0 and (v1 < 0 or (v1 == 0 and v2 < 0))):
        n = -n
    return (v0 / n + 0.0, v1 / n + 0.0, v2 / n + 0.0)


def normalize_projective_cols(v0: np.ndarray, v1: np.ndarray, v2: np.ndarray):
    n = np.sqrt(v0 * v0 + v1 * v1 + v2 * v2)
    if np.any(n == 0.0):
        raise InputError("the zero vector does not define a projective point")
    n = np.where(np.abs(n - 1.0) <= _UNIT_SLACK, 1.0, n)
    neg = (v0 < 0) | ((v0 == 0) & ((v1 < 0) | ((v1 == 0) & (v2 < 0))))
    n = np.where(neg, -n, n)
    return v0 / n + 0.0, v1 / n + 0.0, v2 / n + 0.0


def canonicalize(space: SpaceModel, raw) -> tuple:
    """Return the canonical point for ``raw``; idempotent."""
    coords = [float(c) for c in np.atleast_1d(np.asarray(raw, dtype=float))]
    _check_arity(space, len(coords))
    if not all(math.isfinite(c) for c in coords):
        raise InputError(f"non-finite coordinate in {coords!r}")
    if space.kind == "circle":
        return (wrap_angle(coords[0]),)
    if space.kind == "projective2":
        return normalize_projective(*coords)
    return tuple(c + 0.0 for c in coords)


def canonicalize_array(space: SpaceModel, X) -> np.ndarray:
    """Row-wise :func:`canonicalize` on an ``(n, k)`` array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, space.coord_dim) if space.coord_dim == 1 else X.reshape(1, -1)
    if X.ndim != 2:
        raise InputError(f"expected a 2-d array of points, got shape {X.shape}")
    _check_arity(space, X.shape[1])
    if not np.all(np.isfinite(X)):
        raise InputError("non-finite coordinate in point array")
    if space.kind == "circle":
        return wrap_angles(X)
    if space.kind == "projective2":
        return np.column_stack(normalize_projective_cols(X[:, 0], X[:, 1], X[:, 2]))
    return X + 0.0


# -- metric ------------------------------------------------------------------

def surrogate(space: SpaceModel, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Monotone distance surrogate, broadcasting over leading axes.

    ``X`` and ``Y`` have coordinates on the last axis.  Euclidean spaces use
    squared distance, the circle uses arc length itself and the projective
    plane uses the squared chord to the nearer of the two antipodal
    representatives.
    """
    k = X.shape[-1]
    if space.kind == "circle":
        diff = np.abs(X[..., 0] - Y[..., 0])
        return np.minimum(diff, TWO_PI - diff)
    if space.kind == "projective2":
        minus = plus = 0.0
        for j in range(k):
            a = X[..., j] - Y[..., j]
            b = X[..., j] + Y[..., j]
            minus = minus + a * a
            plus = plus + b * b
        return np.minimum(minus, plus)
    if k > _WIDE:
        # one contiguous row reduction per pair; the same code path for every
        # caller, so the value of a pair does not depend on the batch around it
        D = np.subtract(X, Y)
        return np.ascontiguousarray(D * D).sum(axis=-1)
    acc = 0.0
    for j in range(k):
        a = X[..., j] - Y[..., j]
        acc = acc + a * a
    return np.asarray(acc)


def surrogate_to_distance(space: SpaceModel, s):
    """Convert a surrogate value (or array) into the true distance."""
    s = np.asarray(s, dtype=float)
    if space.kind == "circle":
        out = s
    elif space.kind == "projective2":
        # angle between lines: arccos |<u, v>| == 2 atan2(|u - v|, |u + v|)
        out = 2.0 * np.arctan2(np.sqrt(s), np.sqrt(np.maximum(4.0 - s, 0.0)))
    else:
        out = np.sqrt(s)
    return float(out) if out.ndim == 0 else out


def distance(space: SpaceModel, p, q) -> float:
    P = np.asarray(p, dtype=float).reshape(-1)
    Q = np.asarray(q, dtype=float).reshape(-1)
    _check_arity(space, P.size)
    _check_arity(space, Q.size)
    return surrogate_to_distance(space, surrogate(space, P, Q))


def pairwise_distances(space: SpaceModel, X, Y) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return surrogate_to_distance(space, surrogate(space, X[:, None, :], Y[None, :, :]))


# -- charts and embeddings -----------------------------------------------------

def chart_project(p, threshold: float = CHART_THRESHOLD):
    """Affine chart ``z = 1`` of a canonical projective point.

    Returns ``(x/z, y/z)``, or ``None`` for points within ``threshold`` of the
    line at infinity.
    """
    x, y, z = (float(c) for c in p)
    if abs(z) <= threshold:
        return None
    return (x / z, y / z)


def chart_project_array(X: np.ndarray, threshold: float = CHART_THRESHOLD) -> np.ndarray:
    """Vectorized :func:`chart_project`; near-infinity rows are dropped."""
    X = np.asarray(X, dtype=float)
    keep = np.abs(X[:, 2]) > threshold
    X = X[keep]
    return np.column_stack((X[:, 0] / X[:, 2], X[:, 1] / X[:, 2]))


def ambient_coordinates(space: SpaceModel, X: np.ndarray) -> np.ndarray:
    """Embed stored coordinates into a Euclidean space where the true metric is
    a monotone function of the Euclidean one (used for spatial indexing)."""
    if space.kind == "circle":
        return np.column_stack((np.cos(X[:, 0]), np.sin(X[:, 0])))
    return np.asarray(X, dtype=float)
