"""Map specifications, iterated function systems and map evaluation.

Every map is evaluated by two kernels: a scalar one working on a tuple of
floats (used by the chaos game, one point per step) and a vectorized one
working on an ``(n, k)`` array (used by the Hutchinson operator).  Both use
the same sequence of IEEE operations, so the image of a point does not
depend on which path computed it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import InputError
from .spaces import (
    SpaceModel,
    TWO_PI,
    normalize_projective,
    normalize_projective_cols,
    wrap_angle,
    wrap_angles,
)

BUILTIN_NAMES = (
    "successor-compactification",
    "hilbert-diagonal",
    "two-arrows-1",
    "two-arrows-2",
    "two-arrows-3",
)

_KINDS = ("affine", "rotation", "identity", "projective", "builtin")


def _as_matrix(M) -> tuple:
    arr = np.atleast_2d(np.asarray(M, dtype=float))
    return tuple(tuple(float(v) for v in row) for row in arr)


@dataclass(frozen=True)
class MapSpec:
    """Declarative description of one continuous self-map.

    Use the constructors :meth:`affine`, :meth:`rotation`, :meth:`identity`,
    :meth:`projective` and :meth:`builtin` rather than the raw fields.
    """

    kind: str
    matrix: tuple = ()
    offset: tuple = ()
    angle: float = 0.0
    name: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"unknown map kind {self.kind!r}")
        if self.kind == "builtin" and self.name not in BUILTIN_NAMES:
            raise InputError(f"unknown builtin map {self.name!r}; valid: {', '.join(BUILTIN_NAMES)}")
        if self.kind == "projective":
            if len(self.matrix) != 3 or any(len(r) != 3 for r in self.matrix):
                raise InputError("projective maps need a 3x3 matrix")
            if abs(np.linalg.det(np.array(self.matrix))) <= 1e-12:
                raise InputError("projective matrix is singular")
        if self.kind == "affine":
            d = len(self.matrix)
            if d == 0 or any(len(r) != d for r in self.matrix) or len(self.offset) != d:
                raise InputError("affine maps need a square matrix and a matching offset")

    @classmethod
    def affine(cls, A, b) -> "MapSpec":
        A = _as_matrix(A)
        b = tuple(float(v) for v in np.atleast_1d(np.asarray(b, dtype=float)))
        return cls("affine", matrix=A, offset=b)

    @classmethod
    def rotation(cls, angle: float) -> "MapSpec":
        return cls("rotation", angle=float(angle))

    @classmethod
    def identity(cls) -> "MapSpec":
        return cls("identity")

    @classmethod
    def projective(cls, M) -> "MapSpec":
        return cls("projective", matrix=_as_matrix(M))

    @classmethod
    def builtin(cls, name: str) -> "MapSpec":
        return cls("builtin", name=name)

    def compatible_with(self, space: SpaceModel) -> bool:
        if self.kind == "identity":
            return True
        if self.kind == "affine":
            return space.kind == "euclidean" and space.dim == len(self.matrix)
        if self.kind == "rotation":
            return space.kind == "circle" or (space.kind == "euclidean" and space.dim == 2)
        if self.kind == "projective":
            return space.kind == "projective2"
        if self.name == "successor-compactification":
            return space.kind == "circle"
        if self.name == "hilbert-diagonal":
            return space.kind == "sequence"
        return space.kind == "euclidean" and space.dim == 2

    def describe(self) -> str:
        if self.kind == "builtin":
            return self.name
        if self.kind == "rotation":
            return f"rotation {self.angle!r}"
        if self.kind in ("affine", "projective"):
            return f"{self.kind} {self.matrix!r} {self.offset!r}" if self.offset else f"{self.kind} {self.matrix!r}"
        return self.kind


@dataclass(frozen=True)
class IFSSystem:
    """A space together with an ordered, nonempty list of maps."""

    space: SpaceModel
    maps: tuple
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise InputError("an IFS needs at least one map")
        for i, m in enumerate(self.maps):
            if not isinstance(m, MapSpec):
                raise InputError(f"map {i} is not a MapSpec")
            if not m.compatible_with(self.space):
                raise InputError(f"map {i} ({m.kind} {m.name}) cannot act on {self.space.descriptor}")

    def __len__(self):
        return len(self.maps)

    def __getstate__(self):
        # compiled kernels are closures; rebuild them after unpickling
        return {k: v for k, v in self.__dict__.items() if not k.endswith("_kernels")}

    @cached_property
    def scalar_kernels(self) -> tuple:
        return tuple(_scalar_kernel(self.space, m) for m in self.maps)

    @cached_property
    def array_kernels(self) -> tuple:
        return tuple(_array_kernel(self.space, m) for m in self.maps)


# -- kernels -------------------------------------------------------------------

def _linear_rows(A, cols):
    # fixed left-to-right summation order; shared by scalar and array paths
    out = []
    for row in A:
        acc = row[0] * cols[0]
        for a, c in zip(row[1:], cols[1:]):
            acc = acc + a * c
        out.append(acc)
    return out


def successor_embed(n: float) -> float:
    """Circle angle of ``n`` in the one-point compactification of the positive
    integers: ``n -> 2 atan(1/n)``, infinity at angle 0 (the north pole)."""
    if math.isinf(n):
        return 0.0
    return wrap_angle(2.0 * math.atan2(1.0, n))


def _successor(theta: float) -> float:
    # n -> n + 1 in the coordinate t = tan(theta / 2) = 1/n; a circle homeomorphism
    h = 0.5 * theta
    s = math.sin(h)
    return wrap_angle(2.0 * math.atan2(s, math.cos(h) + s))


def hilbert_factors(d: int) -> np.ndarray:
    """Diagonal entries ``1 - 1/(i+1)``, ``i = 1..d``."""
    i = np.arange(1, d + 1, dtype=float)
    return 1.0 - 1.0 / (i + 1.0)


def _scalar_kernel(space: SpaceModel, m: MapSpec):
    kind = m.kind
    if kind == "identity":
        return lambda p: p
    if kind == "affine":
        A, b = m.matrix, m.offset
        if len(A) == 2:
            (a00, a01), (a10, a11) = A
            b0, b1 = b

            def f(p):
                x, y = p
                return (a00 * x + a01 * y + b0 + 0.0, a10 * x + a11 * y + b1 + 0.0)
            return f
        return lambda p: tuple(r + bi + 0.0 for r, bi in zip(_linear_rows(A, p), b))
    if kind == "rotation":
        if space.kind == "circle":
            t = wrap_angle(m.angle)
            return lambda p: (wrap_angle(p[0] + t),)
        c, s = math.cos(m.angle), math.sin(m.angle)
        return lambda p: (c * p[0] - s * p[1] + 0.0, s * p[0] + c * p[1] + 0.0)
    if kind == "projective":
        M = m.matrix
        return lambda p: normalize_projective(*_linear_rows(M, p))
    name = m.name
    if name == "successor-compactification":
        return lambda p: (_successor(p[0]),)
    if name == "hilbert-diagonal":
        fac = tuple(float(v) for v in hilbert_factors(space.dim))
        return lambda p: tuple(c * f + 0.0 for c, f in zip(p, fac))
    if name == "two-arrows-1":
        return lambda p: (p[0] / 2.0 + 0.0, p[1] + 0.0)
    if name == "two-arrows-2":
        return lambda p: ((p[0] + 1.0) / 2.0 + 0.0, p[1] + 0.0)
    return lambda p: (1.0 - p[0] + 0.0, 1.0 - p[1] + 0.0)


def _array_kernel(space: SpaceModel, m: MapSpec):
    kind = m.kind
    if kind == "identity":
        return lambda X: X.copy()
    if kind == "affine":
        A, b = m.matrix, m.offset
        if len(A) == 2:
            (a00, a01), (a10, a11) = A
            b0, b1 = b
            return lambda X: np.column_stack((
                a00 * X[:, 0] + a01 * X[:, 1] + b0 + 0.0,
                a10 * X[:, 0] + a11 * X[:, 1] + b1 + 0.0))

        def f(X):
            cols = [X[:, j] for j in range(X.shape[1])]
            return np.column_stack([r + bi + 0.0 for r, bi in zip(_linear_rows(A, cols), b)])
        return f
    if kind == "rotation":
        if space.kind == "circle":
            t = wrap_angle(m.angle)
            return lambda X: wrap_angles(X + t)
        c, s = math.cos(m.angle), math.sin(m.angle)
        return lambda X: np.column_stack((c * X[:, 0] - s * X[:, 1] + 0.0,
                                          s * X[:, 0] + c * X[:, 1] + 0.0))
    if kind == "projective":
        M = m.matrix
        return lambda X: np.column_stack(
            normalize_projective_cols(*_linear_rows(M, [X[:, 0], X[:, 1], X[:, 2]])))
    name = m.name
    if name == "successor-compactification":
        # transcendental functions: evaluate through the scalar path for exact agreement
        return lambda X: np.array([[_successor(float(a))] for a in X[:, 0]]).reshape(-1, 1)
    if name == "hilbert-diagonal":
        fac = hilbert_factors(space.dim)
        return lambda X: X * fac + 0.0
    if name == "two-arrows-1":
        return lambda X: np.column_stack((X[:, 0] / 2.0 + 0.0, X[:, 1] + 0.0))
    if name == "two-arrows-2":
        return lambda X: np.column_stack(((X[:, 0] + 1.0) / 2.0 + 0.0, X[:, 1] + 0.0))
    return lambda X: np.column_stack((1.0 - X[:, 0] + 0.0, 1.0 - X[:, 1] + 0.0))


def apply_map(space: SpaceModel, m: MapSpec, p) -> tuple:
    """Image of the canonical point ``p`` under ``m``, in canonical form."""
    if not m.compatible_with(space):
        raise InputError(f"{m.kind} map {m.name} cannot act on {space.descriptor}")
    p = tuple(float(c) for c in p)
    if len(p) != space.coord_dim:
        raise InputError(f"point has {len(p)} coordinates, {space.descriptor} needs {space.coord_dim}")
    return _scalar_kernel(space, m)(p)


def apply_map_array(space: SpaceModel, m: MapSpec, X: np.ndarray) -> np.ndarray:
    """Row-wise :func:`apply_map`."""
    if not m.compatible_with(space):
        raise InputError(f"{m.kind} map {m.name} cannot act on {space.descriptor}")
    return _array_kernel(space, m)(np.asarray(X, dtype=float))


__all__ = [
    "BUILTIN_NAMES", "MapSpec", "IFSSystem", "apply_map", "apply_map_array",
    "hilbert_factors", "successor_embed", "TWO_PI",
]
