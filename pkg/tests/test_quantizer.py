import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdlvq.analysis import design_rates, entropy_gaussian
from mdlvq.errors import CorruptionError, InputError
from mdlvq.labeling import solve_labeling
from mdlvq.lattice import make_lattice
from mdlvq.quantizer import Quantizer, QuantizerConfig, base_second_moment, measure
from mdlvq.rings import GaussianInt
from mdlvq.sublattice import build_system


@pytest.fixture(scope="module")
def lab(worked_system):
    return solve_labeling(worked_system, 9, 5)


@pytest.fixture(scope="module")
def q(lab):
    return Quantizer(lab, beta=0.5)


def test_zero_vector(q, lab):
    lam, i1, i2 = q.encode(np.zeros(2))
    assert lam.tolist() == [[0, 0]]
    a1, a2 = lab.label(np.zeros((1, 2), dtype=np.int64))
    assert np.array_equal(q.decode1(i1), a1) and np.array_equal(q.decode2(i2), a2)


def test_round_trip(q):
    X = np.random.default_rng(1).standard_normal((100_000, 2)) * 20
    lam, i1, i2 = q.encode(X)
    assert np.array_equal(q.decode0(i1, i2), lam)
    assert q.system.sub1.contains(q.decode1(i1)) and q.system.sub2.contains(q.decode2(i2))


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=2), st.integers(-4, 4), st.integers(-4, 4))
@settings(max_examples=60)
def test_shift_rule(q, p, u, v):
    t = np.array([u, v]) @ np.array(q.system.product.basis)
    lam = np.array([p])
    a1, a2 = q.labeling.label(lam)
    b1, b2 = q.labeling.label(lam + t)
    assert np.array_equal(b1, a1 + t) and np.array_equal(b2, a2 + t)


def test_corrupted_pair_is_rejected(q):
    _, i1, i2 = q.encode(np.array([[0.3, -1.2], [2.0, 2.0]]))
    bad = i1.copy()
    bad[1] += 100
    with pytest.raises(CorruptionError):
        q.decode0(bad, i2)


def test_encode_input_checks(q):
    with pytest.raises(InputError):
        q.encode(np.zeros((3, 3)))
    with pytest.raises(InputError):
        QuantizerConfig(q.labeling, beta=0.0)
    with pytest.raises(InputError):
        QuantizerConfig(q.labeling, beta=1.0, source="laplace")


def test_trivial_system_has_equal_distortions():
    s = build_system(make_lattice("Zn", 2), 1, 1)
    lab = solve_labeling(s, 1, 1)
    r = measure(QuantizerConfig(lab, 0.1, samples=20_000))
    assert r.d0 == r.d1 == r.d2
    assert r.R0 == r.R1 == r.R2


def test_scaling(q, lab):
    X = np.random.default_rng(2).standard_normal((20_000, 2))
    q2 = Quantizer(lab, beta=q.beta * 2)
    a = q.encode(X)
    b = q2.encode(2 * X)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    e = ((X - q.coords(a[0])) ** 2).mean()
    e2 = ((2 * X - q2.coords(b[0])) ** 2).mean()
    assert e2 == pytest.approx(4 * e, rel=1e-12)
    r = design_rates(entropy_gaussian(), 0.5, 2, 5, 9)
    r2 = design_rates(entropy_gaussian(), 1.0, 2, 5, 9)
    assert all(x - y == pytest.approx(1.0) for x, y in zip(r, r2))


def test_rate_relations(worked_system):
    R0, R1, R2 = design_rates(1.3, 0.05, 2, worked_system.N1, worked_system.N2)
    assert R0 - R1 == pytest.approx(math.log2(5) / 2)
    assert R1 - R2 == pytest.approx(math.log2(9 / 5) / 2)


@pytest.fixture(scope="module")
def fine_report(lab):
    return measure(QuantizerConfig(lab, 0.02, samples=200_000, seed=7))


def test_side_distortions_match_closed_form(fine_report):
    r = fine_report
    assert abs(r.d1 - r.d1_closed) < 3 * r.d1_stderr
    assert abs(r.d2 - r.d2_closed) < 3 * r.d2_stderr


def test_central_distortion_high_rate(fine_report):
    r = fine_report
    G = base_second_moment(make_lattice("Zn", 2))
    assert r.d0 == pytest.approx(G * 2 ** (2 * (entropy_gaussian() - r.R0_analytic)), rel=0.05)
    # far more symbols than samples/10, so the plug-in estimate is flagged
    assert r.entropy_warning


def test_entropy_tracks_design_rate(lab):
    r = measure(QuantizerConfig(lab, 0.1, samples=200_000, seed=5))
    assert not r.entropy_warning
    for m, a in ((r.R0, r.R0_analytic), (r.R1, r.R1_analytic), (r.R2, r.R2_analytic)):
        assert m == pytest.approx(a, abs=0.03)
    assert r.R0_mm >= r.R0


def test_cross_term_vanishes(q):
    # x - lam is uniform on the Voronoi cell, so it is uncorrelated with lam - a1
    X = (np.random.default_rng(3).random((200_000, 2)) - 0.5) * 90
    lam, i1, _ = q.encode(X)
    c = ((X - q.coords(lam)) * (q.coords(lam) - q.coords(q.decode1(i1)))).sum(axis=1)
    assert abs(c.mean()) < 3 * c.std() / math.sqrt(len(c))


def test_measure_is_deterministic(lab):
    cfg = QuantizerConfig(lab, 0.3, samples=5_000, seed=11, chunk=1_000)
    a = measure(cfg).as_dict()
    assert measure(cfg).as_dict() == a
    b = measure(QuantizerConfig(lab, 0.3, samples=5_000, seed=11, chunk=5_000)).as_dict()
    assert b["symbols"] == a["symbols"] and b["R1"] == pytest.approx(a["R1"], rel=1e-12)
    assert b["d1"] == pytest.approx(a["d1"], rel=1e-12)


def test_second_moment_constants():
    assert base_second_moment(make_lattice("A2", 2)) == pytest.approx(0.0801875, abs=1e-6)
    assert base_second_moment(make_lattice("D4", 4)) == pytest.approx(0.0766032, abs=1e-6)


def test_reduced_labeling_is_expanded():
    s = build_system(make_lattice("Zn", 2), GaussianInt(2, 1), GaussianInt(6, 3))
    qr = Quantizer(solve_labeling(s, 9, 5, reduce=True))
    assert qr.labeling.size == 225
    X = np.random.default_rng(4).standard_normal((5_000, 2)) * 30
    lam, i1, i2 = qr.encode(X)
    assert np.array_equal(qr.decode0(i1, i2), lam)
