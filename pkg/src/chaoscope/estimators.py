"""Estimator-style wrappers over the functional core.

These follow the scikit-learn conventions (constructor stores parameters
only, ``fit`` returns ``self``, learned state ends in ``_``) so they compose
with ``get_params``/``set_params`` and ``clone``.  Inputs are arrays of points,
one row per point, in the coordinates of the system's space.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import gallery
from .analysis import DEFAULT_LADDER, basin_probe, tail_convergence
from .chaos import SelectionModel, run_chaos_game
from .exceptions import InputError
from .hutchinson import deterministic_attractor
from .maps import IFSSystem
from .sets import PointCloud


def _system(system) -> IFSSystem:
    if isinstance(system, IFSSystem):
        return system
    if isinstance(system, str):
        return gallery.build(system).system
    raise InputError(f"system must be an IFSSystem or a gallery name, got {type(system).__name__}")


def _points(sys: IFSSystem, X, name="X") -> np.ndarray:
    X = check_array(X, dtype=np.float64, ensure_2d=True, input_name=name)
    if X.shape[1] != sys.space.coord_dim:
        raise InputError(f"{name} has {X.shape[1]} columns, {sys.space.descriptor} needs "
                         f"{sys.space.coord_dim}")
    return X


class HutchinsonAttractor(BaseEstimator):
    """Deterministic attractor of ``system`` grown from the rows of ``X``."""

    def __init__(self, system="sierpinski", eps=2.0**-9, tol=2.0**-8, max_iter=60):
        self.system = system
        self.eps = eps
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        sys = _system(self.system)
        S0 = PointCloud.from_points(sys.space, _points(sys, X))
        self.attractor_, self.report_ = deterministic_attractor(
            sys, S0, self.eps, self.tol, self.max_iter)
        self.system_ = sys
        self.n_iter_ = len(self.report_.ladder)
        return self

    def transform(self, X=None):
        """The attractor's points (input is ignored; kept for pipeline use)."""
        check_is_fitted(self, "attractor_")
        return np.array(self.attractor_.points)


class ChaosGame(BaseEstimator):
    """Chaos-game orbit started from the single row of ``X``.

    ``model`` is a :class:`SelectionModel`, a descriptor string, or ``None``
    for uniform selection.
    """

    def __init__(self, system="sierpinski", n_steps=100_000, model=None, random_state=0,
                 burn_in=1000):
        self.system = system
        self.n_steps = n_steps
        self.model = model
        self.random_state = random_state
        self.burn_in = burn_in

    def _model(self, sys):
        if self.model is None:
            return SelectionModel.uniform(len(sys))
        if isinstance(self.model, str):
            return SelectionModel.parse(self.model, len(sys))
        return self.model

    def fit(self, X, y=None):
        sys = _system(self.system)
        X = _points(sys, X)
        if len(X) != 1:
            raise InputError(f"a chaos game starts from one point, got {len(X)}")
        if not isinstance(self.random_state, (int, np.integer)):
            raise InputError("random_state must be an integer seed")
        self.orbit_ = run_chaos_game(sys, X[0], self.n_steps, self._model(sys), int(self.random_state))
        self.cloud_ = PointCloud(sys.space, self.orbit_.points[self.burn_in:])
        self.system_ = sys
        return self

    def transform(self, X=None):
        """Tail-cloud points after ``burn_in``."""
        check_is_fitted(self, "cloud_")
        return np.array(self.cloud_.points)

    def score(self, reference, ladder=DEFAULT_LADDER, tol=0.02):
        """Convergence report of the fitted orbit against ``reference`` points."""
        check_is_fitted(self, "orbit_")
        ref = PointCloud.from_points(self.system_.space, _points(self.system_, reference, "reference"))
        return tail_convergence(self.orbit_, ref, ladder, tol)


class BasinClassifier(BaseEstimator):
    """Pointwise-basin verdicts relative to a reference set given to ``fit``."""

    def __init__(self, system="sierpinski", k_max=100, eps=2.0**-6, tol=None):
        self.system = system
        self.k_max = k_max
        self.eps = eps
        self.tol = tol

    def fit(self, X, y=None):
        sys = _system(self.system)
        self.reference_ = PointCloud.from_points(sys.space, _points(sys, X))
        self.system_ = sys
        return self

    def predict_verdicts(self, X) -> list:
        check_is_fitted(self, "reference_")
        X = _points(self.system_, X)
        return [basin_probe(self.system_, row, self.reference_, self.k_max, self.eps, self.tol)
                for row in X]

    def predict(self, X) -> np.ndarray:
        return np.array([v.verdict for v in self.predict_verdicts(X)])
