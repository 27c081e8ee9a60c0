import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from mdlvq.assignment import enumerate_optima, hungarian, lexicographic_optimum
from mdlvq.errors import ConstructionError
from oracles import all_optimal_assignments, bitmask_assignment


def matrices(max_n, hi):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(0, hi), min_size=n, max_size=n), min_size=n, max_size=n)
    )


@settings(max_examples=150, deadline=None)
@given(matrices(12, 50))
def test_hungarian_matches_scipy(C):
    C = np.array(C, dtype=np.int64)
    a = hungarian(C)
    r, c = linear_sum_assignment(C)
    assert a.cost == int(C[r, c].sum())
    assert sorted(a.cols.tolist()) == list(range(len(C)))
    # dual certificate
    assert np.all(C - a.u[:, None] - a.v[None, :] >= 0)
    assert a.u.sum() + a.v.sum() == a.cost


@settings(max_examples=60, deadline=None)
@given(matrices(6, 3))
def test_tie_handling_against_brute_force(C):
    C = np.array(C, dtype=np.int64)
    opt = all_optimal_assignments(C)
    lex = lexicographic_optimum(C)
    assert tuple(lex.cols.tolist()) == opt[0]
    got = [tuple(x.tolist()) for x in enumerate_optima(C, limit=10_000)]
    assert got == opt


def test_bitmask_oracle_agrees_with_hungarian():
    rng = np.random.default_rng(0)
    for _ in range(5):
        C = rng.integers(0, 1000, size=(10, 10))
        assert hungarian(C).cost == bitmask_assignment(C)


def test_big_integers_use_exact_arithmetic():
    C = np.array([[10**20, 1], [1, 10**20]], dtype=object)
    a = hungarian(C)
    assert a.cost == 2 and a.cols.tolist() == [1, 0]


def test_negative_and_rectangular():
    assert hungarian([[-5, 0], [0, -5]]).cost == -10
    with pytest.raises(ConstructionError):
        hungarian(np.zeros((2, 3), dtype=int))


def test_enumeration_limit():
    C = np.zeros((4, 4), dtype=np.int64)
    assert len(enumerate_optima(C, limit=5)) == 5
    assert len(enumerate_optima(C, limit=100)) == 24
