import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chaoscope.exceptions import InputError
from chaoscope.spaces import (
    TWO_PI,
    SpaceModel,
    canonicalize,
    canonicalize_array,
    chart_project,
    chart_project_array,
    distance,
)

E1, E2, CIRCLE, P2 = SpaceModel.euclidean(1), SpaceModel.euclidean(2), SpaceModel.circle(), SpaceModel.projective2()
SEQ = SpaceModel.sequence(8)
SPACES = [E2, CIRCLE, P2, SEQ]


def test_distance_examples():
    assert distance(E1, (0.0,), (3.0,)) == 3.0
    assert distance(CIRCLE, (0.1,), canonicalize(CIRCLE, (TWO_PI - 0.1,))) == pytest.approx(0.2, abs=1e-15)
    assert distance(P2, canonicalize(P2, (1, 0, 0)), canonicalize(P2, (0, 1, 0))) == pytest.approx(math.pi / 2, abs=1e-15)
    assert distance(P2, canonicalize(P2, (1, 1, 1)), canonicalize(P2, (2, 2, 2))) == 0.0


def test_distance_dimension_mismatch():
    with pytest.raises(InputError):
        distance(E2, (0.0, 1.0), (0.0, 1.0, 2.0))


def test_canonicalize_examples():
    assert canonicalize(P2, (-2, 0, 0)) == (1.0, 0.0, 0.0)
    assert canonicalize(CIRCLE, (7.0,))[0] == pytest.approx(7.0 - TWO_PI, abs=1e-15)
    assert canonicalize(CIRCLE, (7.0,))[0] == pytest.approx(0.71681, abs=1e-5)
    assert canonicalize(E2, (0.5, -1.0)) == (0.5, -1.0)


@pytest.mark.parametrize("raw", [(0.0, 0.0, 0.0), (1.0, math.nan, 0.0), (math.inf, 0.0, 1.0)])
def test_canonicalize_rejects(raw):
    with pytest.raises(InputError):
        canonicalize(P2, raw)


def test_canonicalize_wrong_arity():
    with pytest.raises(InputError):
        canonicalize(E2, (1.0,))


def test_circle_wraps_two_pi_to_zero():
    assert canonicalize(CIRCLE, (TWO_PI,)) == (0.0,)
    assert canonicalize(CIRCLE, (-1e-20,))[0] < TWO_PI


def test_projective_canonical_form():
    p = canonicalize(P2, (0.0, -3.0, 4.0))
    assert p == (0.0, 0.6, -0.8)
    assert abs(math.fsum(c * c for c in p) - 1.0) <= 1e-12


def test_chart_examples():
    x, y = chart_project(canonicalize(P2, (41, 41, 79)))
    assert x == pytest.approx(41 / 79, rel=1e-14) and y == pytest.approx(0.51899, abs=1e-5)
    assert chart_project(canonicalize(P2, (1, 0, 0))) is None
    assert chart_project(canonicalize(P2, (0, 0, 1))) == (0.0, 0.0)


def test_chart_array_drops_infinity():
    X = canonicalize_array(P2, np.array([[1, 0, 0], [0, 0, 1], [1, 1, 1e-9]]))
    assert chart_project_array(X).shape == (1, 2)


def test_space_parse_round_trip():
    for s in SPACES + [E1]:
        assert SpaceModel.parse(s.descriptor) == s
    with pytest.raises(InputError):
        SpaceModel.parse("hyperbolic 2")
    with pytest.raises(InputError):
        SpaceModel.euclidean(0)


# -- properties -------------------------------------------------------------------

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


def raw_point(space):
    if space.kind == "projective2":
        return st.tuples(finite, finite, finite).filter(lambda v: math.hypot(*v) > 1e-3)
    return st.tuples(*([finite] * space.coord_dim))


def triples(space):
    p = raw_point(space).map(lambda v: canonicalize(space, v))
    return st.tuples(p, p, p)


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.kind)
def test_metric_axioms_random_triples(space):
    rng = np.random.default_rng(7)
    for _ in range(1000):
        if space.kind == "circle":
            raw = rng.uniform(-10, 10, (3, 1))
        else:
            raw = rng.normal(size=(3, space.coord_dim))
        p, q, r = (canonicalize(space, v) for v in raw)
        assert distance(space, p, p) == 0.0
        assert distance(space, p, q) == distance(space, q, p)
        assert distance(space, p, r) <= distance(space, p, q) + distance(space, q, r) + 1e-12


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.kind)
@given(data=st.data())
def test_metric_axioms_property(space, data):
    p, q, r = data.draw(triples(space))
    assert distance(space, p, q) >= 0.0
    assert distance(space, p, q) == distance(space, q, p)
    assert distance(space, p, r) <= distance(space, p, q) + distance(space, q, r) + 1e-12


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.kind)
def test_canonicalize_idempotent(space):
    rng = np.random.default_rng(11)
    X = rng.normal(scale=20.0, size=(1000, space.coord_dim))
    once = canonicalize_array(space, X)
    assert np.array_equal(canonicalize_array(space, once), once)
    for row in X[:200]:
        p = canonicalize(space, row)
        assert canonicalize(space, p) == p


def test_array_and_scalar_canonicalize_agree():
    rng = np.random.default_rng(3)
    for space in SPACES:
        X = rng.normal(scale=5.0, size=(300, space.coord_dim))
        A = canonicalize_array(space, X)
        S = np.array([canonicalize(space, r) for r in X])
        assert np.array_equal(A, S)


@given(v=raw_point(P2), w=raw_point(P2), lam=st.sampled_from([-3.0, 0.5, 10.0]))
def test_projective_distance_scale_invariant(v, w, lam):
    d = distance(P2, canonicalize(P2, v), canonicalize(P2, w))
    scaled = tuple(lam * c for c in v)
    assert abs(distance(P2, canonicalize(P2, scaled), canonicalize(P2, w)) - d) <= 1e-12


@given(v=raw_point(P2), w=raw_point(P2))
def test_projective_distance_matches_arccos(v, w):
    u, x = canonicalize(P2, v), canonicalize(P2, w)
    # compare through cos: arccos itself is ill-conditioned near 1
    dot = abs(sum(a * b for a, b in zip(u, x)))
    assert math.cos(distance(P2, u, x)) == pytest.approx(dot, abs=1e-12)
    assert 0.0 <= distance(P2, u, x) <= math.pi / 2 + 1e-15
