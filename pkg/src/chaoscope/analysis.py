"""Convergence diagnostics: tail closures, orbit closures and basin probes."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chaos import DECAYING_WARNING, OrbitRecord, SelectionModel, run_chaos_game, tail_cloud
from .exceptions import InputError
from .hutchinson import CAUCHY_WINDOW, hutchinson
from .maps import IFSSystem, apply_map, hilbert_factors
from .reports import ATTRACTED, DIVERGED, NOT_ATTRACTED, BasinVerdict, ConvergenceReport
from .sets import PointCloud, decimate, distance_to_point, hausdorff
from .spaces import canonicalize

OVERFLOW_GUARD = 1e12
DEFAULT_LADDER = (0, 100, 1000, 10_000)


def default_basin_tol(eps: float, space) -> float:
    return 4.0 * eps * math.sqrt(space.coord_dim)


def tail_convergence(orbit: OrbitRecord, reference: PointCloud, ladder=DEFAULT_LADDER,
                     tol: float = 0.02, reference_descriptor: str = "supplied") -> ConvergenceReport:
    """Hausdorff distance from each tail cloud ``{x_K, ...}`` to ``reference``.

    ``converged`` is decided by the largest burn-in of the ladder.
    """
    ladder = tuple(int(k) for k in ladder)
    if not ladder:
        raise InputError("empty ladder")
    if reference.space != orbit.system.space:
        raise InputError("reference lives in a different space")
    if max(ladder) >= len(orbit.points) or min(ladder) < 0:
        raise InputError(f"ladder {ladder} out of range for an orbit of {len(orbit.points)} points")
    entries = tuple((K, hausdorff(tail_cloud(orbit, K), reference)) for K in ladder)
    notes = (DECAYING_WARNING,) if orbit.model.experimental else ()
    return ConvergenceReport(entries, reference_descriptor, entries[-1][1] <= tol, tol, notes)


def semiattractor_orbit_check(sys: IFSSystem, x0, n_steps: int, model: SelectionModel, seed: int,
                              reference: PointCloud, tol: float,
                              reference_descriptor: str = "supplied") -> ConvergenceReport:
    """Distance from the closure of the full orbit (no burn-in) to ``reference``.

    The orbit must start on the attractor: ``x0`` farther than ``tol`` from
    ``reference`` is rejected.
    """
    gap = distance_to_point(reference, canonicalize(sys.space, x0))
    if gap > tol:
        raise InputError(f"x0 is {gap:.3g} from the reference set, more than tol={tol}")
    orbit = run_chaos_game(sys, x0, n_steps, model, seed)
    return tail_convergence(orbit, reference, (0,), tol, reference_descriptor)


def _cloud_escaped(S: PointCloud) -> bool:
    if S.space.kind not in ("euclidean", "sequence"):
        return False
    return not np.all(np.abs(S.points) <= OVERFLOW_GUARD)


def basin_probe(sys: IFSSystem, x, reference: PointCloud, k_max: int = 100,
                eps: float | None = 2.0**-6, tol: float | None = None) -> BasinVerdict:
    """Classify ``x`` by whether ``W^k({x})`` approaches ``reference``.

    Checks run at ``k = 0, 1, ..., k_max``; three consecutive checks within
    ``tol`` mean ATTRACTED.  Iterates leave through the overflow guard as
    DIVERGED.  ``eps=None`` iterates exactly (only sensible for one map).
    """
    if tol is None:
        if eps is None:
            raise InputError("tol is required for exact iteration")
        tol = default_basin_tol(eps, sys.space)
    if k_max < 0:
        raise InputError("k_max must be nonnegative")
    p = canonicalize(sys.space, x)
    S = PointCloud(sys.space, np.array([p]), None)
    if eps is not None:
        S = decimate(S, eps)
    streak = 0
    d = math.inf
    for k in range(k_max + 1):
        if k > 0:
            S = hutchinson(sys, S)
            if eps is not None:
                S = decimate(S, eps)
        if _cloud_escaped(S):
            return BasinVerdict(p, DIVERGED, k, d)
        d = hausdorff(S, reference)
        streak = streak + 1 if d <= tol else 0
        if streak >= CAUCHY_WINDOW:
            return BasinVerdict(p, ATTRACTED, k, d)
    return BasinVerdict(p, NOT_ATTRACTED, k_max, d)


@dataclass(frozen=True)
class InvarianceSummary:
    n_probes: int
    n_attracted: int
    n_images: int
    violations: tuple

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_text(self) -> str:
        lines = [f"probes: {self.n_probes}", f"attracted: {self.n_attracted}",
                 f"images_checked: {self.n_images}", f"violations: {len(self.violations)}",
                 f"passed: {str(self.passed).lower()}"]
        lines += [f"violation: probe={p} map={i} verdict={v}" for p, i, v in self.violations]
        return "\n".join(lines) + "\n"


def basin_invariance_check(sys: IFSSystem, probes, reference: PointCloud, k_max: int = 100,
                           eps: float | None = 2.0**-6, tol: float | None = None) -> InvarianceSummary:
    """Every image of an attracted probe must itself be attracted."""
    probes = list(probes)
    if not probes:
        raise InputError("no probes given")
    attracted = images = 0
    violations = []
    for x in probes:
        v = basin_probe(sys, x, reference, k_max, eps, tol)
        if v.verdict != ATTRACTED:
            continue
        attracted += 1
        for i, m in enumerate(sys.maps):
            y = apply_map(sys.space, m, v.point)
            images += 1
            w = basin_probe(sys, y, reference, k_max, eps, tol)
            if w.verdict != ATTRACTED:
                violations.append((v.point, i, w.verdict))
    return InvarianceSummary(len(probes), attracted, images, tuple(violations))


@dataclass(frozen=True)
class HilbertNorms:
    iterated: float
    closed_form: float
    per_coordinate: np.ndarray

    @property
    def agreement(self) -> float:
        return abs(self.iterated - self.closed_form)


def hilbert_tail_norms(d: int, x, k: int) -> HilbertNorms:
    """``||w^k(x)||`` for the diagonal map ``e_i -> (1 - 1/(i+1)) e_i`` on R^d.

    The norm is obtained twice: by applying the map ``k`` times, and from the
    closed form ``(1 - 1/(i+1))^k`` applied per coordinate.  For ``x = r e_k``
    both equal ``(1 - 1/(k+1))^k r``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != d:
        raise InputError(f"x has {x.size} coordinates, expected {d}")
    if k < 0:
        raise InputError("k must be nonnegative")
    fac = hilbert_factors(d)
    y = x.copy()
    for _ in range(k):
        y = y * fac
    closed = fac ** k * x
    return HilbertNorms(float(np.linalg.norm(y)), float(np.linalg.norm(closed)), closed)


def moving_basis_norm(k: int, r: float = 1.0, d: int | None = None) -> HilbertNorms:
    """Norms for ``x = r e_k`` (truncation ``d`` defaults to ``k``)."""
    d = k if d is None else d
    if k < 1:
        raise InputError("k must be at least 1")
    if k > d:
        raise InputError(f"e_{k} does not exist in a {d}-dimensional truncation")
    x = np.zeros(d)
    x[k - 1] = r
    return hilbert_tail_norms(d, x, k)


def decay_step(x, threshold: float = 1e-3, k_max: int = 10_000) -> int | None:
    """First ``k <= k_max`` with ``||w^k(x)|| <= threshold``, or ``None``."""
    y = np.asarray(x, dtype=float).reshape(-1).copy()
    fac = hilbert_factors(y.size)
    for k in range(k_max + 1):
        if np.linalg.norm(y) <= threshold:
            return k
        y = y * fac
    return None


SUCCESSOR_CLAIM = "{inf} is not an attractor of the IFS {X; f}"


def successor_diagnostic(k_max: int = 50, tol: float = 0.05) -> ConvergenceReport:
    """Distances ``d_H(W^k({1}), {inf})`` for the successor map on the compactified
    integers, ``k = 0..k_max``, measured in the circle metric.

    The contrary claim (that ``{inf}`` is not an attractor) is carried as a
    note next to the observed trend; nothing is asserted about it.
    """
    from .gallery import build

    entry = build("successor-compactification")
    sys = entry.system
    pole = PointCloud(sys.space, np.array([entry.reference_point]))
    S = PointCloud(sys.space, np.array([entry.x0]))
    ladder = [(0, hausdorff(S, pole))]
    for k in range(1, k_max + 1):
        S = hutchinson(sys, S)
        ladder.append((k, hausdorff(S, pole)))
    dists = [d for _, d in ladder]
    decreasing = all(b < a for a, b in zip(dists, dists[1:]))
    notes = (
        f"context claim: {SUCCESSOR_CLAIM}",
        f"observed: distance to the north pole strictly decreasing = {str(decreasing).lower()}",
    )
    return ConvergenceReport(tuple(ladder), "single point {inf} (north pole), circle metric",
                             dists[-1] <= tol, tol, notes)
