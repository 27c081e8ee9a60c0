import itertools
from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from mdlvq import exact


def leibniz_det(M):
    n = len(M)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1 if inv % 2 else 1
        for i in range(n):
            term *= M[i][perm[i]]
        total += term
    return total


def square(n, lo=-6, hi=6):
    return st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)


nonsingular = st.integers(1, 4).flatmap(square).filter(lambda M: leibniz_det(M) != 0)


@given(st.integers(1, 4).flatmap(square))
def test_det_matches_permutation_expansion(M):
    assert exact.det(M) == leibniz_det(M)


@given(nonsingular)
def test_inverse(M):
    inv = exact.inverse(M)
    n = len(M)
    assert exact.matmul(M, inv) == [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def same_lattice(A, B):
    """Rows of each are integer combinations of the rows of the other."""
    for X, Y in ((A, B), (B, A)):
        T = exact.matmul(X, exact.inverse(Y))
        if any(Fraction(v).denominator != 1 for row in T for v in row):
            return False
    return True


@given(nonsingular)
def test_hnf_is_triangular_and_spans_same_lattice(M):
    H = exact.hnf(M)
    n = len(M)
    for i in range(n):
        assert H[i][i] > 0
        for j in range(i):
            assert H[i][j] == 0
    assert abs(exact.det(H)) == abs(exact.det(M))
    assert same_lattice(H, M)


@given(nonsingular)
def test_smith_normal_form(M):
    d, P, Q = exact.smith_normal_form(M)
    D = exact.matmul(exact.matmul(P, M), Q)
    n = len(M)
    assert D == [[d[i] if i == j else 0 for j in range(n)] for i in range(n)]
    assert all(v > 0 for v in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(n - 1))
    assert abs(exact.det(P)) == 1 and abs(exact.det(Q)) == 1


@given(st.integers(1, 3).flatmap(lambda k: st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=k + 3, max_size=k + 3)))
def test_left_kernel(M):
    K = exact.left_kernel(M)
    for row in K:
        assert exact.vecmat(row, M) == [0] * 3
    rank = np.linalg.matrix_rank(np.array(M, dtype=float))
    assert len(K) == len(M) - rank


@settings(max_examples=50)
@given(nonsingular)
def test_lll_keeps_lattice_and_shortens(M):
    n = len(M)
    gram = exact.identity(n)
    R = exact.lll(M, gram)
    assert same_lattice(R, M)
    # first vector no longer than the shortest input row (up to the LLL factor)
    first = exact.quad_form(R[0], gram)
    assert first <= 2 ** (n - 1) * min(exact.quad_form(r, gram) for r in M)


def test_smith_example():
    d, _, _ = exact.smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert d == [2, 6, 12]
