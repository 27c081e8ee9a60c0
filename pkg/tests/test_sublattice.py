import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdlvq.errors import InputError, UnsupportedError
from mdlvq.lattice import make_lattice
from mdlvq.rings import EisensteinInt, GaussianInt, Quaternion, gcd_lcm
from mdlvq.sublattice import (
    CosetMap,
    build_system,
    catalog_rows,
    clean_index_catalog,
    d4_witness,
    exhaustive_clean_search_D4,
    find_tie,
    is_clean,
    join,
    meet,
    multiplier,
    similar_index_catalog,
    similar_sublattice,
    witnesses,
)

Z2 = make_lattice("Zn", 2)
A2 = make_lattice("A2")
D4 = make_lattice("D4")
Z4 = make_lattice("Zn", 4)


def test_coset_map():
    cm = CosetMap([[1, 0], [0, 1]], [[3, 9], [0, 15]])
    assert cm.index == 45
    reps = cm.reps()
    assert cm.ids(reps).tolist() == list(range(45))
    assert cm.ids([[3, 9], [0, 15], [6, 33]]).tolist() == [0, 0, 0]
    with pytest.raises(InputError):
        CosetMap([[2, 0], [0, 2]], [[3, 0], [0, 3]])


def test_worked_example_indices(worked_system):
    s = worked_system
    assert (s.N1, s.N2, s.N_cap, s.N_join, s.N_s, s.N_lcm) == (5, 9, 45, 1, 45, 45)
    assert s.product.basis == ((3, 9), (0, 15))
    assert s.check()


def test_similar_sublattice_basics():
    sub = similar_sublattice(Z2, GaussianInt(2, 1))
    assert sub.index == 5
    assert sub.similarity.check(Z2)
    assert sub.covering_radius_sq == 5 * Z2.covering_radius_sq
    U, c2 = multiplier(A2, EisensteinInt(3, 1))
    assert c2 == 7 and similar_sublattice(A2, EisensteinInt(3, 1)).index == 7
    assert sub.contains([[2, 1], [-1, 2]]) and not sub.contains([[1, 0]])


gauss = st.builds(GaussianInt, st.integers(-6, 6), st.integers(-6, 6)).filter(bool)


@settings(max_examples=40, deadline=None)
@given(gauss, gauss)
def test_meet_and_join_are_lcm_and_gcd(x, y):
    a = similar_sublattice(Z2, x)
    b = similar_sublattice(Z2, y)
    g, l = gcd_lcm("G", x.canonical(), y.canonical())
    assert meet(a, b).basis == similar_sublattice(Z2, l).basis
    assert join(a, b).basis == similar_sublattice(Z2, g).basis
    assert a.index * b.index == meet(a, b).index * join(a, b).index


def test_parity_rule_z2_small():
    for N in range(1, 40):
        for xi in witnesses("Zn", 2, N):
            assert is_clean(Z2, similar_sublattice(Z2, xi)) == (N % 2 == 1)


def test_tie_witness():
    sub = similar_sublattice(Z2, GaussianInt(1, 1))
    p = find_tie(Z2, sub)
    assert p is not None
    near = sub.closest.nearest_exact(p)[0]
    assert len(near) > 1


def test_hexagonal_clean_indices_are_products_of_primes_1_mod_6():
    clean = set(clean_index_catalog("A2", 2, 100))
    for N in similar_index_catalog("A2", 2, 100):
        primes_ok = all(p % 6 == 1 for p in _prime_factors(N))
        assert (N in clean) == primes_ok
    # 2 + w has coprime coefficients but index 3 and is not clean
    assert not is_clean(A2, similar_sublattice(A2, EisensteinInt(2, 1)))


def _prime_factors(n):
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    return out + ([n] if n > 1 else [])


def test_catalog_rows_report_clean_witnesses():
    rows = catalog_rows("Zn", 2, 30)
    for r in rows:
        assert r.clean == (r.N % 2 == 1)
        assert similar_sublattice(Z2, r.xi).index == r.N
    d4 = {r.N: r for r in catalog_rows("D4", 4, 7)}
    assert d4[25].clean and d4[49].clean and not d4[9].clean


def test_dimension_one_and_odd_dimensions():
    assert similar_index_catalog("Zn", 3, 100) == [1, 8, 27, 64]
    assert clean_index_catalog("Zn", 1, 10) == [1, 3, 5, 7, 9]


def test_d4_witness_and_search():
    assert d4_witness(7).norm() == 7
    assert d4_witness(5) == Quaternion.d4_form(3, 1)
    r1 = exhaustive_clean_search_D4(1)
    assert r1.exists_clean and r1.n_sublattices == 1
    r5 = exhaustive_clean_search_D4(5)
    assert r5.exists_clean
    right = similar_sublattice(D4, Quaternion.d4_form(3, 1), "right")
    assert right.basis in r5.clean_bases


def test_quaternion_systems():
    s = build_system(Z4, Quaternion(1, 1, 1, 0), Quaternion(2, 1, 0, 0))
    assert (s.N1, s.N2, s.N_s) == (9, 25, 225)
    assert s.check()
    s = build_system(D4, Quaternion.d4_form(3, 1), Quaternion.d4_form(5, 3))
    assert (s.N1, s.N2, s.N_s) == (25, 289, 7225)
    assert s.check()


def test_system_errors():
    with pytest.raises(InputError):
        build_system(Z4, Quaternion(1, 1, 1, 0), Quaternion(1, 1, 1, 0))  # norms not coprime
    with pytest.raises(InputError):
        build_system(Z4, Quaternion(1, 1, 0, 0), Quaternion(1, 0, 0, 0))  # even norm
    with pytest.raises(InputError):
        build_system(D4, Quaternion(1, 1, 1, 0), Quaternion(1, 0, 0, 0))  # wrong form
    with pytest.raises(InputError):
        build_system(A2, GaussianInt(2, 1), EisensteinInt(1, 0))
    with pytest.raises(UnsupportedError):
        witnesses("Zn", 6, 64)


def test_lcm_sublattice_reduces_problem():
    s = build_system(Z2, GaussianInt(2, 1), GaussianInt(6, 3))
    assert (s.N1, s.N2, s.N_s, s.N_lcm) == (5, 45, 225, 45)
    assert s.lcm_sub.contains_lattice(s.product)
    assert s.sub1.contains_lattice(s.lcm_sub) and s.sub2.contains_lattice(s.lcm_sub)
    assert is_clean(s.sub1, s.lcm_sub) and is_clean(s.sub2, s.lcm_sub)
    assert s.N_lcm == math.lcm(s.N1, s.N2)
