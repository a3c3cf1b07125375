import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from chaoscope import BasinClassifier, ChaosGame, HutchinsonAttractor, gallery
from chaoscope.chaos import SelectionModel, run_chaos_game
from chaoscope.exceptions import InputError
from chaoscope.sets import hausdorff


def test_params_and_clone():
    est = ChaosGame("projective-bv", n_steps=500, model="iid:0.3,0.7", random_state=4)
    assert est.get_params() == {"system": "projective-bv", "n_steps": 500, "model": "iid:0.3,0.7",
                                "random_state": 4, "burn_in": 1000}
    twin = clone(est).set_params(random_state=5)
    assert twin.random_state == 5 and est.random_state == 4


def test_hutchinson_attractor_matches_oracle(sierpinski_oracle):
    est = HutchinsonAttractor().fit([[0.0, 0.0]])
    assert est.attractor_ == sierpinski_oracle
    assert est.report_.converged and est.n_iter_ == len(est.report_.ladder)
    assert est.transform().shape == (27527, 2)


def test_chaos_game_wraps_functional_core(sierpinski, sierpinski_oracle):
    est = ChaosGame(n_steps=100_000, random_state=42).fit([[1.0, 1.0]])
    orbit = run_chaos_game(sierpinski, (1.0, 1.0), 100_000, SelectionModel.uniform(3), 42)
    assert est.orbit_ == orbit
    assert len(est.transform()) <= 100_001 - 1000
    rep = est.score(sierpinski_oracle.points)
    assert rep.converged


def test_chaos_game_input_checks():
    with pytest.raises(InputError):
        ChaosGame().fit([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(InputError):
        ChaosGame().fit([[0.0, 0.0, 0.0]])
    with pytest.raises(InputError):
        ChaosGame(random_state=np.random.default_rng(0)).fit([[0.0, 0.0]])
    with pytest.raises(ValueError):
        ChaosGame().fit([[np.nan, 0.0]])
    with pytest.raises(NotFittedError):
        ChaosGame().transform()


def test_basin_classifier():
    hilbert = gallery.build("hilbert-diagonal").system
    clf = BasinClassifier(hilbert, k_max=3000, eps=None, tol=0.01).fit(np.zeros((1, 256)))
    X = np.random.default_rng(3).normal(size=(3, 256))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    assert clf.predict(X).tolist() == ["ATTRACTED"] * 3
    with pytest.raises(NotFittedError):
        BasinClassifier().predict([[0.0, 0.0]])


def test_unknown_system_type():
    with pytest.raises(InputError):
        HutchinsonAttractor(system=3).fit([[0.0, 0.0]])


def test_same_seed_same_cloud():
    a = ChaosGame("circle-rotation", n_steps=5000, random_state=1).fit([[0.0]])
    b = ChaosGame("circle-rotation", n_steps=5000, random_state=1).fit([[0.0]])
    assert hausdorff(a.cloud_, b.cloud_) == 0.0
