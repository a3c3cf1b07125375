"""Chaos-game attractors of iterated function systems, with Hausdorff-distance
convergence diagnostics against deterministic Hutchinson iteration."""
from .analysis import (
    basin_invariance_check,
    basin_probe,
    hilbert_tail_norms,
    moving_basis_norm,
    semiattractor_orbit_check,
    successor_diagnostic,
    tail_convergence,
)
from .chaos import OrbitRecord, SelectionModel, replay, run_chaos_game, tail_cloud
from .estimators import BasinClassifier, ChaosGame, HutchinsonAttractor
from .exceptions import ConfigError, InputError
from .gallery import build
from .hutchinson import deterministic_attractor, hutchinson, iterate_hutchinson
from .maps import IFSSystem, MapSpec, apply_map
from .render import ImageGrid, Viewport, rasterize, write_pgm
from .reports import BasinVerdict, ConvergenceReport
from .sets import PointCloud, decimate, hausdorff, union
from .spaces import SpaceModel, canonicalize, chart_project, distance

__version__ = "0.1.0"
