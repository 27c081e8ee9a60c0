from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from mdlvq.errors import InputError, NotCleanError
from mdlvq.labeling import (
    EdgeStructure,
    alternative_optima,
    discrete_voronoi,
    edge_cost,
    edge_cost_split,
    extreme_optima,
    labeling_cost_matrix,
    lcm_reduce,
    mix_labelings,
    neighbor_list,
    solve_labeling,
)
from mdlvq.lattice import make_lattice
from mdlvq.rings import GaussianInt
from mdlvq.sublattice import build_system
from oracles import bitmask_assignment, brute_cost_matrix, to_integer_matrix

Z2 = make_lattice("Zn", 2)


def test_worked_example_sets(worked_system):
    es = EdgeStructure(worked_system)
    assert (len(es.V0), len(es.P1), len(es.P2)) == (45, 9, 5)
    got = {tuple(r) for r in neighbor_list(worked_system, 1, (2, 1)).tolist()}
    assert got == {(0, 0), (0, 3), (3, 3), (6, 0), (3, 0)}
    ids = es.class_id(np.array([[-2, -1], [4, 2]]), np.array([[-6, 0], [0, 3]]))
    assert ids[0] == ids[1]
    with pytest.raises(InputError):
        neighbor_list(worked_system, 1, (1, 0))


def test_line_system_sets(line_system):
    es = EdgeStructure(line_system)
    assert es.V0.ravel().tolist() == list(range(-7, 8))
    assert es.P1.ravel().tolist() == [-6, -3, 0, 3, 6]
    assert es.P2.ravel().tolist() == [-5, 0, 5]


def test_voronoi_requires_clean():
    s = build_system(Z2, GaussianInt(1, 1), GaussianInt(1, 0))
    with pytest.raises(NotCleanError) as e:
        discrete_voronoi(Z2, s.sub1)
    assert e.value.point is not None


vec = st.lists(st.integers(-9, 9), min_size=2, max_size=2)


@given(vec, vec, vec, st.integers(0, 9), st.integers(1, 9))
def test_cost_decomposition(lam, a, b, g1, g2):
    s1, s2 = edge_cost_split(Z2, lam, a, b, g1, g2)
    assert s1 + s2 == edge_cost(Z2, lam, a, b, g1, g2)


@pytest.mark.parametrize("g", [(1, 1), (9, 5), (1, 3), (0, 1)])
def test_cost_matrix_matches_brute_force(line_system, g):
    C, scale = labeling_cost_matrix(line_system, *g)
    B = brute_cost_matrix(line_system, *g, window=3)
    assert np.array_equal(np.vectorize(lambda v: Fraction(int(v)) * scale, otypes=[object])(C), B)


@pytest.mark.parametrize("g", [(1, 1), (9, 5), (2, 7)])
def test_line_system_optimum_bitmask(line_system, g):
    lab = solve_labeling(line_system, *g)
    B, scale = to_integer_matrix(brute_cost_matrix(line_system, *g, window=3))
    assert lab.cost == bitmask_assignment(B) * scale


def test_worked_example_optimum_scipy(worked_system):
    lab = solve_labeling(worked_system, 9, 5)
    assert lab.cost == 1248
    B, scale = to_integer_matrix(brute_cost_matrix(worked_system, 9, 5))
    r, c = linear_sum_assignment(B.astype(np.int64))
    assert lab.cost == int(B[r, c].sum()) * scale
    assert lab.side_excess() == (Fraction(26, 45), Fraction(26, 15))


def test_labeling_structure(worked_system):
    s = worked_system
    lab = solve_labeling(s, 9, 5)
    assert s.sub1.contains(lab.lam1) and s.sub2.contains(lab.lam2)
    assert sorted(lab.coset_ids.tolist()) == list(range(45))
    # shift rule
    t = np.array([[3, 9], [0, 15], [-3, 6]])
    p = np.repeat(lab.points[:1], 3, axis=0)
    a1, a2 = lab.label(p + t)
    assert np.array_equal(a1, lab.lam1[:1] + t) and np.array_equal(a2, lab.lam2[:1] + t)
    assert sum(lab.costs) == lab.cost
    # each stored edge costs what its point pays
    for p, x, y, k in zip(lab.points.tolist(), lab.lam1.tolist(), lab.lam2.tolist(), lab.costs):
        assert edge_cost(Z2, p, x, y, 9, 5) == k


def test_reduced_problem_gives_full_optimum():
    s = build_system(Z2, GaussianInt(2, 1), GaussianInt(6, 3))
    red = solve_labeling(s, 9, 5, reduce=True)
    assert red.size == 45
    full = lcm_reduce(s, red)
    assert full.size == 225
    assert full.cost == red.cost * 5 == 27840
    direct = solve_labeling(s, 9, 5)
    assert direct.cost == full.cost
    with pytest.raises(InputError):
        lcm_reduce(s, direct)


def test_alternative_and_extreme_optima(worked_system):
    alts = alternative_optima(worked_system, 1, 1, limit=4)
    assert len(alts) >= 2
    assert len({a.cost for a in alts}) == 1
    lo, hi = extreme_optima(worked_system, 1, 1)
    assert lo.cost == hi.cost == 192
    assert lo.side_excess() == (Fraction(14, 15), Fraction(6, 5))
    assert hi.side_excess() == (Fraction(4, 3), Fraction(4, 5))
    mix = mix_labelings(lo, hi, 0.25)
    assert mix.d1 == pytest.approx(0.25 * 14 / 15 + 0.75 * 4 / 3)
    with pytest.raises(InputError):
        mix_labelings(lo, solve_labeling(worked_system, 9, 5), 0.5)


def test_zero_weight_labels_side_one_by_nearest(line_system):
    lab = solve_labeling(line_system, 1, 0)
    # side 1 takes the nearest point of 3Z whenever possible
    d = np.abs(lab.points - lab.lam1).ravel()
    assert d.max() <= 1


def test_weight_errors(line_system):
    with pytest.raises(InputError):
        solve_labeling(line_system, 0, 0)
    with pytest.raises(InputError):
        solve_labeling(line_system, -1, 2)
