import json
import math

import numpy as np
import pytest

from chaoscope import gallery
from chaoscope.analysis import (
    basin_invariance_check,
    basin_probe,
    decay_step,
    default_basin_tol,
    hilbert_tail_norms,
    moving_basis_norm,
    semiattractor_orbit_check,
    successor_diagnostic,
    tail_convergence,
    SUCCESSOR_CLAIM,
)
from chaoscope.chaos import SelectionModel, run_chaos_game
from chaoscope.exceptions import InputError
from chaoscope.hutchinson import iterate_hutchinson
from chaoscope.maps import IFSSystem, MapSpec, successor_embed
from chaoscope.reports import ATTRACTED, DIVERGED, NOT_ATTRACTED, BasinVerdict, ConvergenceReport
from chaoscope.sets import PointCloud, hausdorff
from chaoscope.spaces import SpaceModel

E1 = SpaceModel.euclidean(1)
CONST = IFSSystem(E1, (MapSpec.affine([[0.0]], [0.75]),), "const")
C_REF = PointCloud(E1, np.array([[0.75]]))
UNIFORM3 = SelectionModel.uniform(3)


def circle_sample(n=10_000):
    return PointCloud(SpaceModel.circle(), np.linspace(0, 2 * math.pi, n, endpoint=False)[:, None])


def test_tail_convergence_constant_map():
    orbit = run_chaos_game(CONST, (5.0,), 50, SelectionModel.uniform(1), 0)
    rep = tail_convergence(orbit, C_REF, (1, 10, 40), tol=1e-9)
    assert [d for _, d in rep.ladder] == [0.0, 0.0, 0.0]
    assert rep.converged


def test_tail_convergence_sierpinski(sierpinski, sierpinski_oracle):
    orbit = run_chaos_game(sierpinski, (1.0, 1.0), 100_000, UNIFORM3, 42)
    rep = tail_convergence(orbit, sierpinski_oracle, (0, 100, 1000, 10_000), 0.02)
    assert rep.converged and rep.final <= 0.02
    assert rep.ladder[-1][1] <= rep.ladder[0][1]


def test_tail_convergence_ladder_out_of_range(sierpinski, sierpinski_oracle):
    orbit = run_chaos_game(sierpinski, (0.0, 0.0), 100, UNIFORM3, 1)
    with pytest.raises(InputError):
        tail_convergence(orbit, sierpinski_oracle, (0, 101))
    with pytest.raises(InputError):
        tail_convergence(orbit, C_REF, (0,))


def test_report_serializations():
    rep = ConvergenceReport(((0, 0.5), (10, 0.25)), "oracle", False, 0.1, ("n1",))
    assert "ladder 10: 0.25" in rep.to_text()
    rec = json.loads(rep.to_record())
    assert rec["final_dH"] == 0.25 and rec["ladder"] == [[0, 0.5], [10, 0.25]]
    assert json.loads(ConvergenceReport((), "none", False, 0.1).to_record())["final_dH"] is None
    with pytest.raises(InputError):
        ConvergenceReport(((5, 0.1), (5, 0.2)), "x", False, 0.1)
    with pytest.raises(InputError):
        ConvergenceReport(((5, -0.1),), "x", False, 0.1)
    v = BasinVerdict((1.0, 2.0), DIVERGED, 3, math.inf)
    assert json.loads(v.to_record())["final_dH"] is None
    assert v.table_row() == "1.0,2.0\tDIVERGED\t3\tinf"
    with pytest.raises(InputError):
        BasinVerdict((0.0,), "MAYBE", 0, 0.0)


def test_basin_probe_examples(sierpinski, sierpinski_oracle_coarse):
    assert basin_probe(sierpinski, (0.0, 0.0), sierpinski_oracle_coarse).verdict == ATTRACTED
    far = basin_probe(sierpinski, (100.0, 100.0), sierpinski_oracle_coarse)
    assert far.verdict == ATTRACTED and far.k_reached > 3
    succ = gallery.build("successor-compactification")
    pole = PointCloud(succ.system.space, np.array([[0.0]]))
    v = basin_probe(succ.system, (successor_embed(1),), pole, k_max=100, eps=None, tol=0.05)
    assert v.verdict == ATTRACTED
    assert v.final_dH <= 0.05


def test_basin_probe_escape_and_budget():
    doubler = IFSSystem(E1, (MapSpec.affine([[2.0]], [0.0]),), "doubler")
    zero = PointCloud(E1, np.array([[0.0]]))
    assert basin_probe(doubler, (1.0,), zero, k_max=100).verdict == DIVERGED
    assert basin_probe(doubler, (1.0,), zero, k_max=5).verdict == NOT_ATTRACTED
    with pytest.raises(InputError):
        basin_probe(doubler, (1.0,), zero, eps=None)


def test_basin_probe_needs_three_consecutive_checks():
    ident = IFSSystem(E1, (MapSpec.identity(),), "id")
    ref = PointCloud(E1, np.array([[0.0]]))
    v = basin_probe(ident, (0.0,), ref, k_max=2, eps=None, tol=0.1)
    assert v.verdict == ATTRACTED and v.k_reached == 2
    v = basin_probe(ident, (0.0,), ref, k_max=1, eps=None, tol=0.1)
    assert v.verdict == NOT_ATTRACTED


def test_default_basin_tol():
    assert default_basin_tol(2.0**-6, SpaceModel.euclidean(2)) == pytest.approx(4 * 2.0**-6 * math.sqrt(2))


def test_invariance_identity_system():
    ident = IFSSystem(E1, (MapSpec.identity(),), "id")
    ref = PointCloud(E1, np.array([[0.3]]))
    summary = basin_invariance_check(ident, [(0.3,)], ref, k_max=5, eps=None, tol=1e-12)
    assert summary.n_attracted == 1 and summary.passed


def test_invariance_sierpinski_small(sierpinski, sierpinski_oracle_coarse):
    rng = np.random.default_rng(8)
    summary = basin_invariance_check(sierpinski, rng.uniform(size=(15, 2)), sierpinski_oracle_coarse)
    assert summary.n_attracted == 15 and summary.n_images == 45 and summary.passed


def test_invariance_circle_rotation():
    sys = gallery.build("circle-rotation").system
    probes = [(0.0,), (1.0,), (4.0,)]
    summary = basin_invariance_check(sys, probes, circle_sample(2000), k_max=400, eps=2.0**-6)
    assert summary.n_attracted == 3 and summary.passed
    assert "violations: 0" in summary.to_text()


def test_invariance_requires_probes(sierpinski, sierpinski_oracle_coarse):
    with pytest.raises(InputError):
        basin_invariance_check(sierpinski, [], sierpinski_oracle_coarse)


def test_semiattractor_examples(sierpinski, sierpinski_oracle):
    rep = semiattractor_orbit_check(sierpinski, (0.0, 0.0), 100_000, UNIFORM3, 42, sierpinski_oracle, 0.02)
    assert [k for k, _ in rep.ladder] == [0] and rep.converged
    const = semiattractor_orbit_check(CONST, (0.75,), 100, SelectionModel.uniform(1), 0, C_REF, 1e-9)
    assert const.final == 0.0
    with pytest.raises(InputError):
        semiattractor_orbit_check(sierpinski, (5.0, 5.0), 100, UNIFORM3, 0, sierpinski_oracle, 0.02)


def test_semiattractor_circle_rotation():
    sys = gallery.build("circle-rotation").system
    rep = semiattractor_orbit_check(sys, (2.0,), 1_000_000, SelectionModel.uniform(2), 5,
                                    circle_sample(), 0.01)
    assert rep.final <= 0.01


def test_semiattractor_and_tail_agree(sierpinski, sierpinski_oracle):
    semi = semiattractor_orbit_check(sierpinski, (0.0, 0.0), 100_000, UNIFORM3, 9, sierpinski_oracle, 0.02)
    orbit = run_chaos_game(sierpinski, (0.0, 0.0), 100_000, UNIFORM3, 9)
    tail = tail_convergence(orbit, sierpinski_oracle, (1000,), 0.02)
    assert abs(semi.final - tail.final) <= 2 * 0.02


def test_hilbert_norm_examples():
    assert hilbert_tail_norms(4, [1, 0, 0, 0], 1).iterated == 0.5
    ten = moving_basis_norm(10)
    assert ten.iterated == pytest.approx((10 / 11) ** 10, abs=1e-12)
    assert ten.iterated == pytest.approx(0.3855432894, abs=1e-10)
    assert ten.agreement <= 1e-12
    big = moving_basis_norm(10_000)
    assert abs(big.iterated - math.exp(-1)) <= 5e-5
    with pytest.raises(InputError):
        moving_basis_norm(11, d=10)


def test_moving_basis_scales_with_r():
    assert moving_basis_norm(7, r=3.0).iterated == pytest.approx(3.0 * (7 / 8) ** 7, rel=1e-14)


def test_l2_two_sided_behaviour():
    rng = np.random.default_rng(12)
    for _ in range(5):
        x = rng.normal(size=256)
        k = decay_step(x, threshold=1e-3 * np.linalg.norm(x))
        assert k is not None
    ks = np.arange(8, 10_001, dtype=float)
    assert np.all((1 - 1 / (ks + 1)) ** ks > 0.36)
    for k in (8, 9, 50, 1000):
        assert moving_basis_norm(k).iterated > 0.36


def test_hilbert_attracted_cloud_converges_as_a_set():
    entry = gallery.build("hilbert-diagonal")
    sys = entry.system
    zero = PointCloud(sys.space, np.zeros((1, 256)))
    rng = np.random.default_rng(2)
    X = rng.normal(size=(4, 256))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    for x in X:
        assert basin_probe(sys, x, zero, k_max=3000, eps=None, tol=0.01).verdict == ATTRACTED
    S = PointCloud(sys.space, X)
    assert hausdorff(iterate_hutchinson(sys, S, 3000, None), zero) <= 0.01


def test_successor_diagnostic():
    rep = successor_diagnostic()
    d = [v for _, v in rep.ladder]
    assert [k for k, _ in rep.ladder] == list(range(51))
    assert all(b < a for a, b in zip(d, d[1:]))
    assert d[-1] < 0.05
    assert f"context claim: {SUCCESSOR_CLAIM}" in rep.notes
    assert any("strictly decreasing = true" in n for n in rep.notes)
