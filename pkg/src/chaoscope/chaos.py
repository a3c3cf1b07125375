"""Random orbits under pluggable map-selection models."""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, InputError
from .maps import IFSSystem, apply_map
from .sets import PointCloud
from .spaces import SpaceModel, canonicalize

RNG_ALGORITHM = "numpy.PCG64"
SUM_TOL = 1e-12
DECAYING_WARNING = "decaying selection probabilities: outside the uniform minorization hypothesis"


def _rows(weights) -> tuple:
    try:
        arr = np.atleast_2d(np.asarray(weights, dtype=float))
    except ValueError:
        raise InputError("weight rows must be equal-length lists of numbers") from None
    if arr.ndim != 2:
        raise InputError("weights must be a vector or a matrix")
    return tuple(tuple(float(v) for v in row) for row in arr)


def _cumulative(row) -> list:
    # ascending map index; the last bucket absorbs rounding of the sum
    cum = list(np.cumsum(np.asarray(row, dtype=float)))
    cum[-1] = math.inf
    return cum


@dataclass(frozen=True)
class SelectionModel:
    """How the map index of each chaos-game step is drawn.

    ``weights`` holds one row for ``iid`` and ``decaying`` (the base
    distribution), the round-robin schedule rows for ``cyclic`` and the
    transition matrix for ``markov``.  ``floor`` is the guaranteed lower bound
    on every per-step selection probability.
    """

    kind: str
    weights: tuple
    floor: float
    initial: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", _rows(self.weights))
        if self.initial:
            object.__setattr__(self, "initial", _rows(self.initial)[0])
        if self.kind not in ("iid", "cyclic", "markov", "decaying"):
            raise InputError(f"unknown selection model {self.kind!r}")
        if not self.floor > 0:
            raise InputError("the minorization floor must be positive")
        n = self.n_maps
        if any(len(r) != n for r in self.weights):
            raise InputError("all weight rows must have the same length")
        if self.kind == "markov" and len(self.weights) != n:
            raise InputError("a markov transition matrix must be square")
        if self.kind in ("iid", "decaying") and len(self.weights) != 1:
            raise InputError(f"{self.kind} takes a single weight vector")
        rows = list(self.weights) + ([self.initial] if self.initial else [])
        for r in rows:
            if abs(math.fsum(r) - 1.0) > SUM_TOL:
                raise InputError(f"weights {r} do not sum to 1")
            if self.kind != "decaying" and min(r) < self.floor:
                raise InputError(f"weight {min(r)} is below the floor {self.floor}")
            if min(r) < 0:
                raise InputError("weights must be nonnegative")
        if self.kind == "decaying" and self.floor * n > 1.0:
            raise InputError("floor too large for the number of maps")

    # constructors
    @classmethod
    def uniform(cls, n: int) -> "SelectionModel":
        return cls("iid", ((1.0 / n,) * n,), 1.0 / n)

    @classmethod
    def iid(cls, weights, floor: float | None = None) -> "SelectionModel":
        w = _rows(weights)
        return cls("iid", w, min(w[0]) if floor is None else floor)

    @classmethod
    def cyclic(cls, schedules, floor: float | None = None) -> "SelectionModel":
        w = _rows(schedules)
        return cls("cyclic", w, min(min(r) for r in w) if floor is None else floor)

    @classmethod
    def markov(cls, T, floor: float | None = None, initial=None) -> "SelectionModel":
        w = _rows(T)
        return cls("markov", w, min(min(r) for r in w) if floor is None else floor,
                   () if initial is None else initial)

    @classmethod
    def decaying(cls, base, floor: float) -> "SelectionModel":
        return cls("decaying", _rows(base), floor)

    @property
    def n_maps(self) -> int:
        return len(self.weights[0])

    @property
    def experimental(self) -> bool:
        return self.kind == "decaying"

    def step_weights(self, step: int, prev: int | None = None) -> tuple:
        """The selection distribution at ``step`` (1-based)."""
        if self.kind == "iid":
            return self.weights[0]
        if self.kind == "cyclic":
            return self.weights[(step - 1) % len(self.weights)]
        if self.kind == "markov":
            if step <= 1 or prev is None:
                return self.initial or (1.0 / self.n_maps,) * self.n_maps
            return self.weights[prev]
        n = self.n_maps
        start = 1.0 / n
        f = max(self.floor, start / math.log(step + math.e))
        return tuple(f + (1.0 - n * f) * b for b in self.weights[0])

    # text form shared by the CLI and trace headers
    def descriptor(self) -> str:
        rows = "/".join(",".join(repr(v) for v in r) for r in self.weights)
        text = f"{self.kind}:{rows};floor={self.floor!r}"
        if self.initial:
            text += ";initial=" + ",".join(repr(v) for v in self.initial)
        return text

    @classmethod
    def parse(cls, text: str, n_maps: int | None = None) -> "SelectionModel":
        text = text.strip()
        if text == "uniform":
            if n_maps is None:
                raise InputError("'uniform' needs the number of maps")
            return cls.uniform(n_maps)
        kind, sep, rest = text.partition(":")
        if not sep:
            raise InputError(f"bad selection model {text!r}")
        parts = rest.split(";")
        try:
            rows = [[float(v) for v in r.split(",")] for r in parts[0].split("/")]
            opts = dict(p.split("=", 1) for p in parts[1:])
            floor = float(opts["floor"]) if "floor" in opts else None
            initial = [float(v) for v in opts["initial"].split(",")] if "initial" in opts else None
        except ValueError:
            raise InputError(f"bad selection model {text!r}") from None
        if kind == "iid":
            model = cls.iid(rows, floor)
        elif kind == "cyclic":
            model = cls.cyclic(rows, floor)
        elif kind == "markov":
            model = cls.markov(rows, floor, initial)
        elif kind == "decaying":
            if floor is None:
                raise InputError("decaying models need an explicit floor")
            model = cls.decaying(rows, floor)
        else:
            raise InputError(f"unknown selection model {kind!r}")
        if n_maps is not None and model.n_maps != n_maps:
            raise InputError(f"model has {model.n_maps} weights, system has {n_maps} maps")
        return model


def index_from_uniform(model: SelectionModel, step: int, prev: int | None, u: float) -> int:
    """Inverse-CDF lookup of ``u`` in the step's distribution."""
    return bisect_right(_cumulative(model.step_weights(step, prev)), u)


def draw_index(model: SelectionModel, step: int, prev: int | None, rng: np.random.Generator) -> int:
    """Draw the map index for ``step``, consuming exactly one uniform from ``rng``."""
    if model.kind == "markov" and step > 1 and prev is None:
        raise InputError("markov selection needs the previous index after step 1")
    return index_from_uniform(model, step, prev, rng.random())


def make_rng(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise InputError("seeds are unsigned 64-bit integers")
    return np.random.Generator(np.random.PCG64(seed))


def draw_indices(model: SelectionModel, n_steps: int, rng: np.random.Generator) -> np.ndarray:
    """Indices for steps ``1..n_steps``; identical to calling :func:`draw_index` in turn."""
    u = rng.random(n_steps)
    if model.kind == "iid":
        cum = np.array(_cumulative(model.weights[0]))
        return np.searchsorted(cum, u, side="right").astype(np.int64)
    if model.kind == "cyclic":
        out = np.empty(n_steps, dtype=np.int64)
        period = len(model.weights)
        for j, row in enumerate(model.weights):
            sl = slice(j, None, period)
            out[sl] = np.searchsorted(np.array(_cumulative(row)), u[sl], side="right")
        return out
    out = np.empty(n_steps, dtype=np.int64)
    if model.kind == "markov":
        cums = [_cumulative(r) for r in model.weights]
        prev = bisect_right(_cumulative(model.step_weights(1)), u[0]) if n_steps else 0
        if n_steps:
            out[0] = prev
        for i in range(1, n_steps):
            prev = bisect_right(cums[prev], u[i])
            out[i] = prev
        return out
    for i in range(n_steps):
        out[i] = index_from_uniform(model, i + 1, None, u[i])
    return out


@dataclass(frozen=True, eq=False)
class OrbitRecord:
    """A full chaos-game trace; ``points[k]`` is the image of ``points[k-1]``
    under map ``indices[k-1]`` (indices are 0-based)."""

    system: IFSSystem
    x0: tuple
    model: SelectionModel
    rng_seed: int
    indices: np.ndarray
    points: np.ndarray
    rng_algorithm: str = RNG_ALGORITHM

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, OrbitRecord):
            return NotImplemented
        return (self.system == other.system and self.x0 == other.x0 and self.model == other.model
                and self.rng_seed == other.rng_seed and self.rng_algorithm == other.rng_algorithm
                and np.array_equal(self.indices, other.indices)
                and self.points.shape == other.points.shape
                and np.array_equal(self.points, other.points))

    __hash__ = None

    @property
    def metadata(self) -> dict:
        meta = {
            "system": self.system.name,
            "space": self.system.space.descriptor,
            "seed": str(self.rng_seed),
            "rng": self.rng_algorithm,
            "model": self.model.descriptor(),
            "maps": str(len(self.system)),
            "steps": str(len(self.indices)),
        }
        if self.model.experimental:
            meta["warning"] = DECAYING_WARNING
        return meta


def run_chaos_game(sys: IFSSystem, x0, n_steps: int, model: SelectionModel, rng_seed: int) -> OrbitRecord:
    """Generate ``x_n = w_{sigma_n}(x_{n-1})`` for ``n = 1..n_steps``."""
    if int(n_steps) != n_steps or n_steps < 0:
        raise InputError(f"n_steps must be a nonnegative integer, got {n_steps!r}")
    if model.n_maps != len(sys):
        raise InputError(f"model draws from {model.n_maps} maps, system has {len(sys)}")
    p = canonicalize(sys.space, x0)
    x0 = p
    indices = draw_indices(model, int(n_steps), make_rng(rng_seed))
    kernels = sys.scalar_kernels
    points = [p]
    append = points.append
    for i in indices.tolist():
        p = kernels[i](p)
        append(p)
    arr = np.array(points, dtype=float).reshape(len(points), sys.space.coord_dim)
    arr.setflags(write=False)
    indices.setflags(write=False)
    return OrbitRecord(sys, x0, model, int(rng_seed), indices, arr)


def replay(orbit: OrbitRecord) -> np.ndarray:
    """Recompute orbit points from ``x0`` and the index sequence via :func:`apply_map`."""
    space = orbit.system.space
    p = tuple(orbit.x0)
    out = [p]
    for i in orbit.indices.tolist():
        p = apply_map(space, orbit.system.maps[i], p)
        out.append(p)
    return np.array(out, dtype=float).reshape(len(out), space.coord_dim)


def tail_cloud(orbit: OrbitRecord, burn_in: int) -> PointCloud:
    """The deduplicated cloud ``{x_K, ..., x_n}``."""
    if burn_in < 0 or burn_in >= len(orbit.points):
        raise InputError(f"burn-in {burn_in} outside [0, {len(orbit.points)})")
    return PointCloud(orbit.system.space, orbit.points[burn_in:], None)


# -- trace format ----------------------------------------------------------------

TRACE_MAGIC = "# chaoscope orbit trace v1"


def format_trace(orbit: OrbitRecord) -> str:
    lines = [TRACE_MAGIC]
    lines += [f"{k}: {v}" for k, v in orbit.metadata.items()]
    lines.append("x0: " + " ".join(repr(c) for c in orbit.x0))
    lines.append("data:")
    rows = orbit.points.tolist()
    lines.append("0 - " + " ".join(repr(c) for c in rows[0]))
    for k, (i, row) in enumerate(zip(orbit.indices.tolist(), rows[1:]), start=1):
        lines.append(f"{k} {i} " + " ".join(repr(c) for c in row))
    return "\n".join(lines) + "\n"


def write_trace(orbit: OrbitRecord, path) -> None:
    Path(path).write_text(format_trace(orbit))


@dataclass(frozen=True)
class Trace:
    """A parsed trace file: header fields, index sequence and points."""

    header: dict
    space: SpaceModel
    indices: np.ndarray
    points: np.ndarray

    def tail_cloud(self, burn_in: int = 0) -> PointCloud:
        if burn_in < 0 or burn_in >= len(self.points):
            raise InputError(f"burn-in {burn_in} outside [0, {len(self.points)})")
        return PointCloud(self.space, self.points[burn_in:], None)


def parse_trace(text: str, source: str = "trace") -> Trace:
    lines = text.splitlines()
    if not lines or lines[0].strip() != TRACE_MAGIC:
        raise ConfigError("missing trace header", 1, source)
    header = {}
    i = 1
    while i < len(lines) and lines[i].strip() != "data:":
        key, sep, value = lines[i].partition(":")
        if not sep:
            raise ConfigError(f"bad header line {lines[i]!r}", i + 1, source)
        header[key.strip()] = value.strip()
        i += 1
    if i == len(lines):
        raise ConfigError("missing data section", i, source)
    try:
        space = SpaceModel.parse(header["space"])
    except (KeyError, InputError) as exc:
        raise ConfigError(f"bad space header: {exc}", 2, source) from None
    idx, pts = [], []
    for lineno, line in enumerate(lines[i + 1:], start=i + 2):
        if not line.strip():
            continue
        fields = line.split()
        try:
            k = int(fields[0])
            coords = [float(v) for v in fields[2:]]
            if k != len(pts) or len(coords) != space.coord_dim:
                raise ValueError
            if k > 0:
                idx.append(int(fields[1]))
        except (ValueError, IndexError):
            raise ConfigError(f"bad trace line {line!r}", lineno, source) from None
        pts.append(coords)
    if not pts:
        raise ConfigError("trace has no points", len(lines), source)
    return Trace(header, space, np.array(idx, dtype=np.int64), np.array(pts, dtype=float))


def read_trace(path) -> Trace:
    return parse_trace(Path(path).read_text(), str(path))
