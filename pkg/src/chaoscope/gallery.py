"""Named systems, constructible by identifier."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import InputError
from .maps import IFSSystem, MapSpec, successor_embed
from .spaces import TWO_PI, SpaceModel, canonicalize

GOLDEN_ANGLE = (TWO_PI * (math.sqrt(5.0) - 1.0) / 2.0) % TWO_PI

BV_F1 = ((41.0, -19.0, 19.0), (-19.0, 41.0, 19.0), (19.0, 19.0, 41.0))
BV_F2 = ((-10.0, -1.0, 19.0), (-10.0, 21.0, 1.0), (10.0, 10.0, 10.0))

SIERPINSKI_VERTICES = ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0))


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    system: IFSSystem
    x0: tuple
    n_steps: int
    ladder: tuple
    eps: float
    tol: float
    provenance: str
    reference_point: tuple | None = None
    max_iter: int = 60


def _sierpinski():
    maps = tuple(MapSpec.affine(((0.5, 0.0), (0.0, 0.5)), (vx / 2.0, vy / 2.0))
                 for vx, vy in SIERPINSKI_VERTICES)
    sys = IFSSystem(SpaceModel.euclidean(2), maps, "sierpinski")
    return GalleryEntry("sierpinski", sys, (1.0, 1.0), 100_000, (0, 100, 1000, 10_000),
                        2.0**-9, 2.0**-8,
                        "three half-contractions toward the vertices of an equilateral triangle; "
                        "a contractive reference system with a known attractor")


def _circle_rotation():
    sys = IFSSystem(SpaceModel.circle(), (MapSpec.identity(), MapSpec.rotation(GOLDEN_ANGLE)),
                    "circle-rotation")
    return GalleryEntry("circle-rotation", sys, (0.0,), 1_000_000, (0, 100, 1000, 10_000),
                        1e-4, 2e-3,
                        "identity plus an irrational (golden-ratio) rotation of the circle; "
                        "noncontractive, the whole circle is the strict attractor",
                        max_iter=20_000)


def _two_arrows():
    maps = tuple(MapSpec.builtin(f"two-arrows-{i}") for i in (1, 2, 3))
    sys = IFSSystem(SpaceModel.euclidean(2), maps, "two-arrows-maps")
    return GalleryEntry("two-arrows-maps", sys, (0.3, 0.0), 100_000, (0, 100, 1000, 10_000),
                        2.0**-10, 2.0**-9,
                        "halving maps on each arrow and the flip (x, j) -> (1 - x, 1 - j), "
                        "under the Euclidean metric of [0, 1] x {0, 1}")


def _successor():
    sys = IFSSystem(SpaceModel.circle(), (MapSpec.builtin("successor-compactification"),),
                    "successor-compactification")
    return GalleryEntry("successor-compactification", sys, (successor_embed(1),), 1000, (0, 10, 100),
                        1e-12, 1e-3,
                        "n -> n + 1 on the one-point compactification of the positive integers, "
                        "embedded in the circle with infinity at the north pole",
                        reference_point=(0.0,), max_iter=50)


def _hilbert():
    sys = IFSSystem(SpaceModel.sequence(256), (MapSpec.builtin("hilbert-diagonal"),),
                    "hilbert-diagonal")
    x0 = tuple(1.0 if i == 0 else 0.0 for i in range(256))
    return GalleryEntry("hilbert-diagonal", sys, x0, 10_000, (0, 100, 1000),
                        1e-9, 1e-2,
                        "diagonal map e_i -> (1 - 1/(i+1)) e_i on square-summable sequences, "
                        "truncated to 256 coordinates; nonexpansive with attractor {0}",
                        reference_point=tuple(0.0 for _ in range(256)), max_iter=20_000)


def _projective_bv():
    sys = IFSSystem(SpaceModel.projective2(), (MapSpec.projective(BV_F1), MapSpec.projective(BV_F2)),
                    "projective-bv")
    return GalleryEntry("projective-bv", sys, canonicalize(sys.space, (1.0, 1.0, 1.0)), 100_000,
                        (0, 100, 1000, 10_000), 2.0**-9, 2.0**-8,
                        "two invertible 3x3 matrices acting on the real projective plane; "
                        "no closed-form attractor, so runs are judged by cross-seed stability")


_BUILDERS = {
    "sierpinski": _sierpinski,
    "circle-rotation": _circle_rotation,
    "two-arrows-maps": _two_arrows,
    "successor-compactification": _successor,
    "hilbert-diagonal": _hilbert,
    "projective-bv": _projective_bv,
}

NAMES = tuple(_BUILDERS)


def build(name: str) -> GalleryEntry:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise InputError(f"unknown system {name!r}; valid names: {', '.join(NAMES)}") from None
