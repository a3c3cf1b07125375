"""The Hutchinson operator on finite clouds and the deterministic attractor oracle."""
from __future__ import annotations

import math

import numpy as np

from .exceptions import InputError
from .maps import IFSSystem
from .reports import ConvergenceReport
from .sets import PointCloud, decimate, hausdorff

CAUCHY_WINDOW = 3


def _check_cloud(sys: IFSSystem, S: PointCloud):
    if not isinstance(S, PointCloud):
        raise InputError("expected a PointCloud")
    if S.space != sys.space:
        raise InputError(f"cloud lives in {S.space.descriptor}, system in {sys.space.descriptor}")


def hutchinson(sys: IFSSystem, S: PointCloud) -> PointCloud:
    """Union of the images of ``S`` under every map, exact dedup."""
    _check_cloud(sys, S)
    images = [k(S.points) for k in sys.array_kernels]
    return PointCloud(sys.space, np.vstack(images), None)


def iterate_hutchinson(sys: IFSSystem, S0: PointCloud, k: int, eps: float | None) -> PointCloud:
    """``k`` rounds of Hutchinson step followed by grid decimation.

    ``eps=None`` skips decimation (exact iteration; cloud sizes grow as N^k).
    With decimation the result is within ``k * eps * sqrt(d) / 2`` of the
    exact iterate for nonexpansive systems.
    """
    if k < 0:
        raise InputError("step count must be nonnegative")
    _check_cloud(sys, S0)
    S = S0 if eps is None else decimate(S0, eps)
    for _ in range(k):
        S = hutchinson(sys, S)
        if eps is not None:
            S = decimate(S, eps)
    return S


def deterministic_attractor(sys: IFSSystem, S0: PointCloud, eps: float | None, tol: float,
                            max_iter: int, against: PointCloud | None = None):
    """Iterate the Hutchinson operator until successive iterates stabilize.

    Stops once ``d_H(W^k S0, W^(k-1) S0) <= tol`` holds for three consecutive
    steps, or after ``max_iter`` steps.  Returns the last cloud and a report
    whose ladder holds the successive distances.  When ``against`` is given
    the report notes also carry the distance of every iterate to it.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    if max_iter < 1:
        raise InputError("max_iter must be at least 1")
    _check_cloud(sys, S0)
    S = S0 if eps is None else decimate(S0, eps)
    ladder, notes = [], []
    streak = 0
    converged = False
    for k in range(1, max_iter + 1):
        nxt = hutchinson(sys, S)
        if eps is not None:
            nxt = decimate(nxt, eps)
        d = hausdorff(nxt, S)
        if not math.isfinite(d):
            raise InputError(f"iterate {k} left the representable range")
        ladder.append((k, d))
        if against is not None:
            notes.append(f"dH_to_reference {k}: {hausdorff(nxt, against)!r}")
        S = nxt
        streak = streak + 1 if d <= tol else 0
        if streak >= CAUCHY_WINDOW:
            converged = True
            break
    desc = f"successive-difference eps={eps!r} window={CAUCHY_WINDOW}"
    return S, ConvergenceReport(tuple(ladder), desc, converged, tol, tuple(notes))
