"""Command-line front end.

Exit codes: 0 success, 1 a supplied reference was not reached, 2 invalid
input or configuration, 3 numeric guard tripped (orbit or iterate escaped).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import gallery
from .analysis import OVERFLOW_GUARD, basin_probe, default_basin_tol, tail_convergence
from .chaos import SelectionModel, TRACE_MAGIC, read_trace, run_chaos_game, write_trace
from .config import RunConfig, read_config, read_system
from .exceptions import ConfigError, InputError
from .hutchinson import deterministic_attractor
from .reports import ConvergenceReport
from .render import Viewport, rasterize, write_pgm
from .sets import CLOUD_MAGIC, PointCloud, read_cloud, write_cloud

EXIT_OK, EXIT_UNCONVERGED, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
SEED_ENV = "CHAOSCOPE_SEED"


class GuardTripped(RuntimeError):
    pass


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.replace(",", " ").split())
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _resolve(args) -> tuple:
    """Build the RunConfig from --config / --system plus flag overrides."""
    entry = None
    if getattr(args, "config", None):
        cfg = read_config(args.config)
    elif args.system is None:
        raise InputError("one of --system or --config is required")
    elif args.system in gallery.NAMES:
        entry = gallery.build(args.system)
        cfg = RunConfig.from_gallery(args.system)
    elif Path(args.system).is_file():
        system = read_system(args.system)
        if args.x0 is None:
            raise InputError("--x0 is required with a custom system file")
        cfg = RunConfig(system, _floats(args.x0))
    else:
        raise InputError(f"unknown system {args.system!r}; valid names: {', '.join(gallery.NAMES)}"
                         " (or a config file path)")
    over = {}
    if args.x0 is not None:
        over["x0"] = _floats(args.x0)
    if getattr(args, "steps", None) is not None:
        over["n_steps"] = args.steps
    if args.seed is not None:
        over["seed"] = args.seed
    elif not getattr(args, "config", None):
        over["seed"] = _default_seed()
    if getattr(args, "model", None):
        over["model"] = SelectionModel.parse(args.model, len(cfg.system))
    if getattr(args, "burn_in", None):
        over["ladder"] = tuple(int(v) for v in _floats(args.burn_in))
    for key in ("eps", "tol", "max_iter"):
        if getattr(args, key, None) is not None:
            over[key] = getattr(args, key)
    if over:
        from dataclasses import replace
        cfg = replace(cfg, **over)
    return cfg, entry


def _oracle(cfg: RunConfig, entry, eps=None):
    eps = cfg.eps if eps is None else eps
    if entry is not None and entry.reference_point is not None:
        ref = PointCloud.from_points(cfg.system.space, np.array([entry.reference_point]))
        return ref, f"fixed point {entry.name} reference"
    S0 = PointCloud(cfg.system.space, np.array([cfg.x0]))
    cloud, rep = deterministic_attractor(cfg.system, S0, eps, cfg.tol, cfg.max_iter)
    return cloud, f"deterministic oracle eps={eps!r} converged={str(rep.converged).lower()}"


def _load_reference(arg: str, cfg: RunConfig, entry, eps=None):
    if arg == "oracle":
        return _oracle(cfg, entry, eps)
    if arg.startswith("point:"):
        p = _floats(arg[len("point:"):])
        desc = f"point {arg[6:]}" if len(p) <= 4 else f"point with {len(p)} coordinates"
        return PointCloud.from_points(cfg.system.space, np.array([p])), desc
    cloud = read_cloud(arg)
    if cloud.space != cfg.system.space:
        raise InputError(f"reference cloud {arg} lives in {cloud.space.descriptor}")
    return cloud, f"cloud file {arg}"


def _escaped(space, points) -> bool:
    if not np.all(np.isfinite(points)):
        return True
    return space.kind in ("euclidean", "sequence") and bool(np.any(np.abs(points) > OVERFLOW_GUARD))


def _emit(report_path, text: str, record: str):
    if report_path:
        Path(report_path).write_text(text)
    print(record)


# -- commands ------------------------------------------------------------------------

def cmd_run(args) -> int:
    # --tol here is the convergence threshold, not the oracle's Cauchy tolerance
    tol = 0.02 if args.tol is None else args.tol
    args.tol = None
    cfg, entry = _resolve(args)
    with np.errstate(over="ignore", invalid="ignore"):
        orbit = run_chaos_game(cfg.system, cfg.x0, cfg.n_steps, cfg.selection, cfg.seed)
    trace = args.trace or cfg.outputs.get("trace", "orbit.trace")
    report_path = args.report or cfg.outputs.get("report", "report.txt")
    if _escaped(cfg.system.space, orbit.points):
        write_trace(orbit, trace)
        raise GuardTripped(f"orbit left the overflow guard {OVERFLOW_GUARD:g}")
    write_trace(orbit, trace)
    if not args.reference:
        meta = dict(orbit.metadata, trace=str(trace), reference="none")
        text = "".join(f"{k}: {v}\n" for k, v in meta.items())
        _emit(report_path, text, json.dumps(dict(meta, type="orbit"), sort_keys=True))
        return EXIT_OK
    ref, desc = _load_reference(args.reference, cfg, entry)
    ladder = tuple(k for k in cfg.ladder if k < len(orbit.points))
    rep = tail_convergence(orbit, ref, ladder, tol, desc)
    _emit(report_path, rep.to_text(), rep.to_record())
    return EXIT_OK if rep.converged else EXIT_UNCONVERGED


def cmd_oracle(args) -> int:
    cfg, entry = _resolve(args)
    S0 = PointCloud(cfg.system.space, np.array([cfg.x0]))
    against = None
    if args.against:
        against = PointCloud.from_points(cfg.system.space, np.array([_floats(args.against)]))
    elif entry is not None and entry.reference_point is not None:
        against = PointCloud(cfg.system.space, np.array([entry.reference_point]))
    eps = None if args.exact else cfg.eps
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            cloud, rep = deterministic_attractor(cfg.system, S0, eps, cfg.tol, cfg.max_iter, against)
        except InputError as exc:
            raise GuardTripped(str(exc)) from None
    if _escaped(cfg.system.space, cloud.points):
        raise GuardTripped(f"iterate left the overflow guard {OVERFLOW_GUARD:g}")
    if entry is not None and entry.name == "successor-compactification":
        from .analysis import SUCCESSOR_CLAIM
        rep = ConvergenceReport(rep.ladder, rep.reference_descriptor, rep.converged, rep.tol,
                                rep.notes + (f"context claim: {SUCCESSOR_CLAIM}",))
    write_cloud(cloud, args.out or cfg.outputs.get("cloud", "attractor.cloud"))
    _emit(args.report or cfg.outputs.get("report", "oracle_report.txt"), rep.to_text(), rep.to_record())
    return EXIT_OK


def _load_drawable(path: str, burn_in: int) -> PointCloud:
    try:
        with open(path) as fh:
            first = fh.readline().strip()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if first == CLOUD_MAGIC:
        return read_cloud(path)
    if first == TRACE_MAGIC:
        return read_trace(path).tail_cloud(burn_in)
    raise ConfigError("not a cloud or trace file", 1, path)


def cmd_render(args) -> int:
    cloud = _load_drawable(args.input, args.burn_in)
    w, h = args.size
    if args.xrange and args.yrange:
        vp = Viewport(tuple(args.xrange), tuple(args.yrange), w, h, autoscale=False)
    else:
        vp = Viewport(width=w, height=h, autoscale=True)
    img = rasterize(cloud, vp, args.chart_threshold)
    write_pgm(img, args.out, ascii=args.ascii)
    print(json.dumps({"type": "render", "dark_pixels": img.dark_pixels, "width": w, "height": h,
                      "path": str(args.out)}, sort_keys=True))
    return EXIT_OK


def _grid_probes(grid, space) -> list:
    x0, x1, y0, y1, nx, ny = grid
    nx, ny = int(nx), int(ny)
    if space.coord_dim != 2 or nx < 1 or ny < 1:
        raise InputError("--grid needs a 2-coordinate space and positive counts")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    return [(float(x), float(y)) for y in ys for x in xs]


def _random_probes(n: int, space, seed: int) -> list:
    rng = np.random.Generator(np.random.PCG64(seed))
    X = rng.standard_normal((n, space.coord_dim))
    if space.kind in ("sequence", "projective2"):
        X /= np.linalg.norm(X, axis=1, keepdims=True)
    elif space.kind == "circle":
        X = rng.uniform(0.0, 2 * np.pi, (n, 1))
    else:
        X = rng.uniform(0.0, 1.0, (n, space.coord_dim))
    return [tuple(float(c) for c in row) for row in X]


def _probe_task(task):
    system, x, ref, k_max, eps, tol = task
    with np.errstate(over="ignore", invalid="ignore"):
        return basin_probe(system, x, ref, k_max, eps, tol)


def cmd_basin(args) -> int:
    cfg, entry = _resolve(args)
    space = cfg.system.space
    eps = None if args.exact else (args.eps if args.eps is not None else 2.0**-6)
    tol = args.tol if args.tol is not None else (default_basin_tol(eps, space) if eps else None)
    if tol is None:
        raise InputError("--tol is required with --exact")
    if args.grid:
        probes = _grid_probes(args.grid, space)
    elif args.random:
        probes = _random_probes(args.random, space, cfg.seed)
    elif args.probes:
        lines = Path(args.probes).read_text().splitlines()
        probes = [_floats(line) for line in lines if line.strip() and not line.startswith("#")]
    else:
        probes = [cfg.x0]
    ref, desc = _load_reference(args.reference, cfg, entry, eps or cfg.eps)
    tasks = [(cfg.system, p, ref, args.k_max, eps, tol) for p in probes]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            verdicts = list(pool.map(_probe_task, tasks))
    else:
        verdicts = [_probe_task(t) for t in tasks]
    header = [f"# system: {cfg.system.name}", f"# reference: {desc}",
              f"# k_max: {args.k_max}", f"# eps: {eps!r}", f"# tol: {tol!r}",
              "# point\tverdict\tk_reached\tfinal_dH"]
    out = "\n".join(header + [v.table_row() for v in verdicts]) + "\n"
    Path(args.out).write_text(out)
    counts = {}
    for v in verdicts:
        counts[v.verdict] = counts.get(v.verdict, 0) + 1
    print(json.dumps(dict(counts, type="basin_table", probes=len(verdicts), path=str(args.out)),
                     sort_keys=True))
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------

def _common(p, steps=False):
    p.add_argument("--system", help="gallery name or system file")
    p.add_argument("--config", help="full run configuration file")
    p.add_argument("--x0", "--from-point", dest="x0", help="initial point, comma separated")
    p.add_argument("--seed", type=int, help=f"RNG seed (default ${SEED_ENV} or 0)")
    p.add_argument("--eps", type=float, help="decimation resolution")
    p.add_argument("--tol", type=float, help="Hausdorff tolerance")
    if steps:
        p.add_argument("--steps", type=int, help="number of chaos-game steps")
        p.add_argument("--model", help="selection model, e.g. uniform or iid:0.5,0.5")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaoscope",
                                     description="Chaos-game attractors and convergence diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a chaos game and measure tail convergence")
    _common(p, steps=True)
    p.add_argument("--burn-in", help="ladder of burn-in values, e.g. 0,100,1000,10000")
    p.add_argument("--reference", help="'oracle', 'point:<coords>' or a cloud file")
    p.add_argument("--max-iter", dest="max_iter", type=int, help="oracle iteration budget")
    p.add_argument("--trace", help="orbit trace output path")
    p.add_argument("--report", help="report output path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("oracle", help="deterministic Hutchinson iteration")
    _common(p)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--exact", action="store_true", help="no decimation")
    p.add_argument("--against", help="also report distances to this point")
    p.add_argument("--out", help="cloud output path")
    p.add_argument("--report", help="report output path")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("render", help="rasterize a cloud or trace to PGM")
    p.add_argument("input")
    p.add_argument("--out", default="image.pgm")
    p.add_argument("--size", type=int, nargs=2, default=(800, 800), metavar=("W", "H"))
    p.add_argument("--xrange", type=float, nargs=2)
    p.add_argument("--yrange", type=float, nargs=2)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=0)
    p.add_argument("--chart-threshold", dest="chart_threshold", type=float, default=1e-6)
    p.add_argument("--ascii", action="store_true", help="write plain P2 instead of P5")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("basin", help="classify probe points by pointwise attraction")
    _common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--grid", type=float, nargs=6, metavar=("X0", "X1", "Y0", "Y1", "NX", "NY"))
    g.add_argument("--random", type=int, help="number of random probes")
    g.add_argument("--probes", help="file with one point per line")
    p.add_argument("--reference", default="oracle")
    p.add_argument("--k-max", dest="k_max", type=int, default=100)
    p.add_argument("--exact", action="store_true", help="no decimation")
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="basin.tsv")
    p.set_defaults(func=cmd_basin)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GuardTripped, FloatingPointError, OverflowError) as exc:
        print(f"numeric guard: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
