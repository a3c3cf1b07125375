"""Run configurations and the flat text format for custom systems.

A configuration file has ``[system]``, one ``[map]`` section per map, and an
optional ``[run]`` section::

    [system]
    name = doubler
    space = euclidean 1

    [map]
    kind = affine
    matrix = 2.0
    offset = 0.0

    [run]
    x0 = 1.0
    steps = 100
    seed = 3

Matrices are written row-major, rows separated by ``;``.  Instead of maps,
``[system]`` may name a gallery entry with ``gallery = sierpinski``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from . import gallery
from .chaos import SelectionModel
from .exceptions import ConfigError, InputError
from .maps import IFSSystem, MapSpec
from .spaces import SpaceModel, canonicalize

_RUN_KEYS = ("x0", "steps", "model", "seed", "ladder", "eps", "tol", "max_iter",
             "trace", "report", "cloud", "image")


@dataclass(frozen=True)
class RunConfig:
    system: IFSSystem
    x0: tuple
    n_steps: int = 100_000
    model: SelectionModel | None = None
    seed: int = 0
    ladder: tuple = (0, 100, 1000, 10_000)
    eps: float = 2.0**-9
    tol: float = 2.0**-8
    max_iter: int = 60
    outputs: dict = field(default_factory=dict, compare=True, hash=False)

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 0:
            raise InputError(f"steps must be a nonnegative integer, got {self.n_steps!r}")
        if not self.eps > 0 or not self.tol > 0:
            raise InputError("eps and tol must be positive")
        if self.max_iter < 1:
            raise InputError("max_iter must be at least 1")
        if self.seed < 0 or self.seed >= 2**64:
            raise InputError("seed must be an unsigned 64-bit integer")
        ladder = tuple(int(k) for k in self.ladder)
        if any(b <= a for a, b in zip(ladder, ladder[1:])) or (ladder and ladder[0] < 0):
            raise InputError("ladder must be strictly increasing and nonnegative")
        object.__setattr__(self, "ladder", ladder)
        object.__setattr__(self, "x0", canonicalize(self.system.space, self.x0))
        if self.model is not None and self.model.n_maps != len(self.system):
            raise InputError(f"model has {self.model.n_maps} weights, system has {len(self.system)} maps")

    @property
    def selection(self) -> SelectionModel:
        return self.model or SelectionModel.uniform(len(self.system))

    @classmethod
    def from_gallery(cls, name: str, **overrides) -> "RunConfig":
        e = gallery.build(name)
        base = cls(e.system, e.x0, e.n_steps, None, 0, e.ladder, e.eps, e.tol, e.max_iter)
        return replace(base, **overrides) if overrides else base


# -- serialization -----------------------------------------------------------------

def _fmt_vec(v) -> str:
    return " ".join(repr(float(c)) for c in v)


def _fmt_matrix(M) -> str:
    return "; ".join(_fmt_vec(r) for r in M)


def format_system(sys: IFSSystem) -> list:
    lines = ["[system]", f"name = {sys.name}", f"space = {sys.space.descriptor}"]
    for m in sys.maps:
        lines += ["", "[map]", f"kind = {m.kind}"]
        if m.kind == "affine":
            lines += [f"matrix = {_fmt_matrix(m.matrix)}", f"offset = {_fmt_vec(m.offset)}"]
        elif m.kind == "projective":
            lines.append(f"matrix = {_fmt_matrix(m.matrix)}")
        elif m.kind == "rotation":
            lines.append(f"angle = {m.angle!r}")
        elif m.kind == "builtin":
            lines.append(f"name = {m.name}")
    return lines


def format_config(cfg: RunConfig) -> str:
    lines = format_system(cfg.system)
    lines += ["", "[run]", f"x0 = {_fmt_vec(cfg.x0)}", f"steps = {cfg.n_steps}"]
    if cfg.model is not None:
        lines.append(f"model = {cfg.model.descriptor()}")
    lines += [
        f"seed = {cfg.seed}",
        "ladder = " + " ".join(str(k) for k in cfg.ladder),
        f"eps = {cfg.eps!r}",
        f"tol = {cfg.tol!r}",
        f"max_iter = {cfg.max_iter}",
    ]
    lines += [f"{k} = {v}" for k, v in sorted(cfg.outputs.items())]
    return "\n".join(lines) + "\n"


# -- parsing -------------------------------------------------------------------------

def _sections(text: str, source: str):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = (line[1:-1].strip(), lineno, {})
            if current[0] not in ("system", "map", "run"):
                raise ConfigError(f"unknown section [{current[0]}]", lineno, source)
            sections.append(current)
            continue
        if current is None:
            raise ConfigError("key outside of any section", lineno, source)
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno, source)
        key = key.strip()
        if key in current[2]:
            raise ConfigError(f"duplicate key {key!r}", lineno, source)
        current[2][key] = (value.strip(), lineno)
    return sections


def _floats(value: str, lineno: int, source: str) -> list:
    try:
        return [float(v) for v in value.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"expected numbers, got {value!r}", lineno, source) from None


def _matrix(value: str, lineno: int, source: str) -> list:
    return [_floats(r, lineno, source) for r in value.split(";")]


def _parse_map(body: dict, lineno: int, source: str) -> MapSpec:
    def need(key):
        if key not in body:
            raise ConfigError(f"[map] needs '{key}'", lineno, source)
        return body[key]

    kind, kline = need("kind")
    try:
        if kind == "affine":
            (mv, ml), (ov, ol) = need("matrix"), need("offset")
            return MapSpec.affine(_matrix(mv, ml, source), _floats(ov, ol, source))
        if kind == "projective":
            mv, ml = need("matrix")
            return MapSpec.projective(_matrix(mv, ml, source))
        if kind == "rotation":
            av, al = need("angle")
            return MapSpec.rotation(_floats(av, al, source)[0])
        if kind == "identity":
            return MapSpec.identity()
        if kind == "builtin":
            return MapSpec.builtin(need("name")[0])
    except (InputError, ValueError, IndexError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), lineno, source) from None
    raise ConfigError(f"unknown map kind {kind!r}", kline, source)


def parse_system(text: str, source: str = "config") -> IFSSystem:
    return _parse(text, source, need_run=False)[0]


def parse_config(text: str, source: str = "config") -> RunConfig:
    return _parse(text, source, need_run=True)[1]


def _parse(text: str, source: str, need_run: bool):
    sections = _sections(text, source)
    systems = [s for s in sections if s[0] == "system"]
    maps = [s for s in sections if s[0] == "map"]
    runs = [s for s in sections if s[0] == "run"]
    if len(systems) != 1:
        raise ConfigError("exactly one [system] section is required",
                          systems[1][1] if len(systems) > 1 else None, source)
    if len(runs) > 1:
        raise ConfigError("at most one [run] section is allowed", runs[1][1], source)
    _, sline, sbody = systems[0]
    entry = None
    if "gallery" in sbody:
        gname, gline = sbody["gallery"]
        if maps:
            raise ConfigError("a gallery system cannot also list maps", maps[0][1], source)
        try:
            entry = gallery.build(gname)
        except InputError as exc:
            raise ConfigError(str(exc), gline, source) from None
        system = entry.system
    else:
        if "space" not in sbody:
            raise ConfigError("[system] needs 'space' (or 'gallery')", sline, source)
        sval, sl = sbody["space"]
        try:
            space = SpaceModel.parse(sval)
        except InputError as exc:
            raise ConfigError(str(exc), sl, source) from None
        if not maps:
            raise ConfigError("no [map] sections", sline, source)
        specs = [_parse_map(body, line, source) for _, line, body in maps]
        name = sbody.get("name", ("custom", sline))[0]
        try:
            system = IFSSystem(space, tuple(specs), name)
        except InputError as exc:
            raise ConfigError(str(exc), maps[0][1], source) from None
    if not need_run:
        return system, None

    body = runs[0][2] if runs else {}
    rline = runs[0][1] if runs else sline
    for key, (_, line) in body.items():
        if key not in _RUN_KEYS:
            raise ConfigError(f"unknown [run] key {key!r}", line, source)
    kw = {}
    if entry is not None:
        kw = dict(x0=entry.x0, n_steps=entry.n_steps, ladder=entry.ladder, eps=entry.eps,
                  tol=entry.tol, max_iter=entry.max_iter)

    def field_value(key, conv):
        value, line = body[key]
        try:
            return conv(value)
        except (InputError, ValueError) as exc:
            raise ConfigError(f"bad {key}: {exc}", line, source) from None

    if "x0" in body:
        kw["x0"] = tuple(_floats(*body["x0"], source))
    if "x0" not in kw:
        raise ConfigError("[run] needs 'x0' for a custom system", rline, source)
    for key, target, conv in (("steps", "n_steps", int), ("seed", "seed", int),
                              ("eps", "eps", float), ("tol", "tol", float),
                              ("max_iter", "max_iter", int)):
        if key in body:
            kw[target] = field_value(key, conv)
    if "ladder" in body:
        kw["ladder"] = field_value("ladder", lambda v: tuple(int(t) for t in v.replace(",", " ").split()))
    if "model" in body:
        kw["model"] = field_value("model", lambda v: SelectionModel.parse(v, len(system)))
    outputs = {k: body[k][0] for k in ("trace", "report", "cloud", "image") if k in body}
    try:
        return system, RunConfig(system, outputs=outputs, **kw)
    except InputError as exc:
        raise ConfigError(str(exc), rline, source) from None


def read_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(), str(path))


def read_system(path) -> IFSSystem:
    return parse_system(Path(path).read_text(), str(path))
