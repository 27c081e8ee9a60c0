import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdlvq import exact
from mdlvq.errors import InputError
from mdlvq.lattice import (
    ClosestPoints,
    Similarity,
    coords_of,
    index_of,
    integer_lattice,
    make_lattice,
    nearest_point,
    quantize,
    second_moment,
)

LATTICES = [make_lattice("Zn", 1), make_lattice("Zn", 2), make_lattice("Zn", 3), make_lattice("A2"), make_lattice("D4")]


def brute_nearest_dist(lat, x, radius=3):
    G = lat.generator_float
    t = np.rint(np.linalg.solve(G.T, x)).astype(int)
    box = np.array(list(itertools.product(range(-radius, radius + 1), repeat=lat.dim)))
    P = (t + box) @ G
    return ((P - x) ** 2).sum(axis=1).min()


@pytest.mark.parametrize("lat", LATTICES, ids=lambda l: f"{l.kind}{l.dim}")
def test_gram_and_volume(lat):
    G = lat.generator_float
    assert np.allclose(G @ G.T, np.array(lat.gram, dtype=float))
    assert math.isclose(lat.volume, abs(np.linalg.det(G)))


def test_known_constants():
    assert make_lattice("Zn", 3).covering_radius_sq == Fraction(3, 4)
    assert make_lattice("A2").covering_radius_sq == Fraction(1, 3)
    assert make_lattice("D4").covering_radius_sq == 1
    assert make_lattice("A2").det_gram == Fraction(3, 4)
    assert make_lattice("D4").det_gram == 4


@pytest.mark.parametrize("lat", LATTICES, ids=lambda l: f"{l.kind}{l.dim}")
def test_quantize_matches_brute_force(lat):
    rng = np.random.default_rng(7)
    X = rng.normal(scale=3.0, size=(400, lat.dim))
    C = quantize(lat, X)
    d = ((coords_of(lat, C) - X) ** 2).sum(axis=1)
    for x, dist in zip(X, d):
        assert dist <= brute_nearest_dist(lat, x) + 1e-9


@pytest.mark.parametrize("lat", LATTICES, ids=lambda l: f"{l.kind}{l.dim}")
def test_covering_radius_is_attained_and_never_exceeded(lat):
    rng = np.random.default_rng(3)
    X = rng.uniform(-4, 4, size=(2000, lat.dim))
    d = ((coords_of(lat, quantize(lat, X)) - X) ** 2).sum(axis=1)
    assert d.max() <= float(lat.covering_radius_sq) + 1e-9
    holes = {"Zn": [0.5] * lat.dim, "A2": [0.5, math.sqrt(3) / 6], "D4": [1, 0, 0, 0]}
    assert math.isclose(brute_nearest_dist(lat, np.array(holes[lat.kind], dtype=float)), float(lat.covering_radius_sq))


@settings(max_examples=60)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6), min_size=4, max_size=4))
def test_nearest_point_exact_d4(x):
    lat = make_lattice("D4")
    p = nearest_point(lat, x)
    xf = np.array([float(v) for v in x])
    d = sum((float(c) - v) ** 2 for c, v in zip(p.coords, xf))
    assert d <= brute_nearest_dist(lat, xf) + 1e-12


def test_nearest_point_tie_rule():
    # (1/2) is equidistant from 0 and 1; the smaller coefficient wins
    assert nearest_point(integer_lattice(1), [Fraction(1, 2)]).coeffs == (0,)
    with pytest.raises(InputError):
        nearest_point(integer_lattice(2), [1])


def test_closest_points_reports_ties():
    cp = ClosestPoints([[3]], [[1]])
    near, num, den, ties = cp.search([[3], [1], [2]], 2)  # 3/2, 1/2, 1
    assert ties.tolist() == [2, 1, 1]
    assert (num / den).tolist() == [2.25, 0.25, 1.0]
    winners, dist = cp.nearest_exact([3], 2)
    assert winners == [(0,), (3,)] and dist == Fraction(9, 4)


def test_scaled_quantize():
    lat = integer_lattice(2, Fraction(1, 2))
    assert quantize(lat, [[0.74, -0.26]]).tolist() == [[1, -1]]


def test_similarity_check():
    A2 = make_lattice("A2")
    # multiplication by 2+w on the hexagonal lattice
    U = Similarity([[2, 1], [-1, 1]], 3)
    assert U.check(A2) and index_of(U, 2) == 3
    K = U.rotation(A2)
    assert np.allclose(K @ K.T, np.eye(2)) and np.isclose(np.linalg.det(K), 1)
    assert not Similarity([[1, 0], [0, -1]], 1).check(integer_lattice(2))  # reflection
    with pytest.raises(InputError):
        index_of(Similarity([[2, 0], [0, 1]], 3), 2)


def test_second_moment():
    assert second_moment(make_lattice("Zn", 3)).value == Fraction(1, 12)
    g = second_moment(make_lattice("A2"), samples=200_000, seed=1)
    assert abs(g.value - 5 / (36 * math.sqrt(3))) < 4 * g.stderr + 1e-4
    g = second_moment(make_lattice("D4"), samples=200_000, seed=1)
    assert abs(g.value - 13 / (120 * math.sqrt(2))) < 4 * g.stderr + 1e-4


def test_bad_inputs():
    with pytest.raises(InputError):
        make_lattice("E8", 8)
    with pytest.raises(InputError):
        quantize(make_lattice("A2"), np.zeros((2, 3)))
    with pytest.raises(InputError):
        integer_lattice(2, 0)
