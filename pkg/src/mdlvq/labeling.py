"""Edge sets and the optimal shift-invariant labeling.

A fine lattice point is labeled by an edge (lam1, lam2) of Lambda_1 x
Lambda_2.  The labeling is fixed on one discrete Voronoi cell V0 of the
product sublattice and extended by shifts.  Labels for V0 are chosen by an
exact assignment between V0's points and the N1*N2 edge classes modulo the
product sublattice, minimizing

    g1 |lam - a1(lam)|^2 + g2 |lam - a2(lam)|^2

summed over V0 (plain squared norms).  Points and edges are integer
coefficient rows with respect to the base lattice generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import exact
from .assignment import Assignment, enumerate_optima, hungarian, lexicographic_optimum
from .errors import ConstructionError, InputError, NotCleanError, UnsupportedError
from .lattice import Lattice, LatticePoint
from .sublattice import CosetMap, Sublattice, SublatticeSystem, _as_fine

# ---------------------------------------------------------------------------
# Voronoi sets and edges


def _sort_rows(A: np.ndarray) -> np.ndarray:
    if len(A) == 0:
        return A
    return A[np.lexsort(A.T[::-1])]


def discrete_voronoi(fine, coarse: Sublattice, center=None) -> np.ndarray:
    """Points of ``fine`` strictly nearer to ``center`` than to any other coarse point.

    ``center`` must be a coarse lattice point (defaults to 0).  Rows are
    sorted lexicographically.  Raises NotCleanError on a tie.
    """
    cm = CosetMap(_as_fine(fine), coarse.basis)
    reps = cm.reps()
    nearest, _, _, ties = coarse.closest.search(reps)
    bad = np.nonzero(ties > 1)[0]
    if len(bad):
        pt = tuple(int(v) for v in reps[bad[0]])
        raise NotCleanError(f"point {pt} is equidistant from two sublattice points", point=pt)
    V = reps - nearest
    if center is not None:
        c = np.asarray(center, dtype=np.int64)
        if not coarse.contains(c):
            raise InputError("center must be a point of the coarse lattice")
        V = V + c
    return _sort_rows(V)


def _sqnorms(lat: Lattice, D: np.ndarray) -> list[Fraction]:
    A = lat.gram
    return [Fraction(exact.quad_form([int(v) for v in d], A)) for d in D]


@dataclass(frozen=True)
class Edge:
    lam1: tuple
    lam2: tuple
    coset_id: int


def _in(sub: Sublattice, P: np.ndarray) -> np.ndarray:
    return sub.cosets.ids(P) == 0 if len(P) else np.zeros(0, dtype=bool)


class EdgeStructure:
    """V0, P1, P2, the neighbor lists and the edge classes of one system.

    ``domain`` is the sublattice the labeling is periodic under: the product
    sublattice, or the lcm sublattice for the reduced problem.
    """

    def __init__(self, system: SublatticeSystem, domain: Sublattice | None = None):
        self.system = system
        self.base = system.base
        self.domain = domain or system.product
        self.reduced = domain is not None and domain.basis != system.product.basis
        self.V0 = discrete_voronoi(self.base, system.product)
        self.V0_set = {tuple(r) for r in self.V0.tolist()}
        self.points = self.V0 if not self.reduced else discrete_voronoi(self.base, self.domain)
        self.rank1 = CosetMap(system.sub1.basis, system.product.basis)  # N2 classes
        self.rank2 = CosetMap(system.sub2.basis, system.product.basis)  # N1 classes
        self.dom1 = CosetMap(system.sub1.basis, self.domain.basis)

    @cached_property
    def P1(self) -> np.ndarray:
        if self.reduced:
            return discrete_voronoi(self.system.sub1, self.domain)
        return self.V0[_in(self.system.sub1, self.V0)]

    @cached_property
    def P2(self) -> np.ndarray:
        return self.V0[_in(self.system.sub2, self.V0)]

    def neighbors(self, side: int, point) -> np.ndarray:
        """L_side(point): points of the other sublattice inside V0 + point."""
        p = np.asarray(point, dtype=np.int64).reshape(1, -1)
        own, other = (self.system.sub1, self.system.sub2) if side == 1 else (self.system.sub2, self.system.sub1)
        if not own.contains(p):
            raise InputError(f"{tuple(p[0])} is not a point of sublattice {side}")
        C = self.V0 + p
        return _sort_rows(C[_in(other, C)])

    def class_id(self, lam1, lam2) -> np.ndarray:
        """Edge class ids modulo the product sublattice: rank(lam1)*N1 + rank(lam2)."""
        N1 = self.system.N1
        return self.rank1.ids(lam1) * N1 + self.rank2.ids(lam2)

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edge class representatives with lam1 in P1, as (lam1, lam2, id) arrays.

        Ids are product-sublattice class ids, or for the reduced problem
        rank(lam1 mod domain)*N1 + position of lam2 among L1(lam1).
        """
        L1, L2, ids = [], [], []
        N1 = self.system.N1
        for lam1 in self.P1:
            nb = self.neighbors(1, lam1)
            if len(nb) != N1:
                raise ConstructionError(f"|L1({tuple(lam1)})| = {len(nb)}, expected {N1}")
            L1.append(np.repeat(lam1[None, :], len(nb), axis=0))
            L2.append(nb)
            if self.reduced:
                r2 = self.rank2.ids(nb)
                order = np.argsort(np.argsort(r2))
                ids.append(int(self.dom1.ids(lam1)[0]) * N1 + order)
            else:
                ids.append(self.class_id(L1[-1], nb))
        lam1 = np.concatenate(L1)
        lam2 = np.concatenate(L2)
        ids = np.concatenate(ids)
        order = np.argsort(ids, kind="stable")
        lam1, lam2, ids = lam1[order], lam2[order], ids[order]
        n = len(self.points)
        if len(np.unique(ids)) != len(ids) or len(ids) != n or not np.array_equal(ids, np.arange(n)):
            raise ConstructionError(f"edge classes: found {len(np.unique(ids))}, expected {n}")
        return lam1, lam2, ids

    def edges_from_side2(self) -> np.ndarray:
        """Class ids of edges built from P2 and L2 (must equal those from P1)."""
        out = []
        for lam2 in self.P2:
            nb = self.neighbors(2, lam2)
            if len(nb) != self.system.N2:
                raise ConstructionError(f"|L2({tuple(lam2)})| = {len(nb)}, expected {self.system.N2}")
            out.append(self.class_id(nb, np.repeat(lam2[None, :], len(nb), axis=0)))
        return np.sort(np.concatenate(out))


def build_P_sets(system: SublatticeSystem):
    es = EdgeStructure(system)
    return es.P1, es.P2


def neighbor_list(system: SublatticeSystem, side: int, point) -> np.ndarray:
    es = EdgeStructure(system)
    p = tuple(int(v) for v in np.asarray(point).ravel())
    P = es.P1 if side == 1 else es.P2
    if p not in {tuple(r) for r in P.tolist()}:
        raise InputError(f"{p} is not in P{side}")
    return es.neighbors(side, p)


def edge_cosets(system: SublatticeSystem) -> list[Edge]:
    """The N1*N2 edge classes, each represented by its member with lam1 in P1."""
    es = EdgeStructure(system)
    lam1, lam2, ids = es.edges
    if not np.array_equal(es.edges_from_side2(), ids):
        raise ConstructionError("edge classes from P1 and from P2 differ")
    return [Edge(tuple(a), tuple(b), int(c)) for a, b, c in zip(lam1.tolist(), lam2.tolist(), ids.tolist())]


# ---------------------------------------------------------------------------
# Costs


def _weights(g1, g2) -> tuple[Fraction, Fraction]:
    g1, g2 = Fraction(g1), Fraction(g2)
    if g1 < 0 or g2 < 0:
        raise InputError("weights must be nonnegative")
    if g1 == 0 and g2 == 0:
        raise InputError("weights must not both be zero")
    return g1, g2


def edge_cost(lat: Lattice, lam, lam1, lam2, g1, g2) -> Fraction:
    """g1 |lam - lam1|^2 + g2 |lam - lam2|^2 (exact, plain squared norms)."""
    g1, g2 = _weights(g1, g2)
    d1 = [a - b for a, b in zip(lam, lam1)]
    d2 = [a - b for a, b in zip(lam, lam2)]
    return g1 * Fraction(exact.quad_form(d1, lat.gram)) + g2 * Fraction(exact.quad_form(d2, lat.gram))


def edge_cost_split(lat: Lattice, lam, lam1, lam2, g1, g2) -> tuple[Fraction, Fraction]:
    """The two terms of the weighted-mean decomposition of ``edge_cost``.

    g1 g2 / (g1 + g2) |lam2 - lam1|^2 and (g1 + g2) |lam - mean|^2 with
    mean = (g1 lam1 + g2 lam2) / (g1 + g2).
    """
    g1, g2 = _weights(g1, g2)
    s = g1 + g2
    e = [b - a for a, b in zip(lam1, lam2)]
    m = [x - (g1 * a + g2 * b) / s for x, a, b in zip(lam, lam1, lam2)]
    return g1 * g2 / s * Fraction(exact.quad_form(e, lat.gram)), s * Fraction(exact.quad_form(m, lat.gram))


def _integer_weights(g1: Fraction, g2: Fraction):
    den = math.lcm(g1.denominator, g2.denominator)
    return int(g1 * den), int(g2 * den), den


def cost_matrix(es: EdgeStructure, g1, g2, chunk: int = 200_000):
    """Integer cost matrix (points x edge classes) and the factor converting it to exact costs.

    Entry (i, c) is the least cost of labeling point i by any domain shift of
    class c's representative edge.
    """
    g1, g2 = _weights(g1, g2)
    a, b, den_w = _integer_weights(g1, g2)
    s = a + b
    lat = es.base
    gd = exact.common_denominator(v for row in lat.gram for v in row)
    gram_int = np.array([[int(v * gd) for v in row] for row in lat.gram], dtype=object)
    lam1, lam2, _ = es.edges
    P = es.points
    n = len(P)
    E = (lam2 - lam1).astype(object)
    e2 = np.einsum("ij,jk,ik->i", E, gram_int, E)  # |lam2 - lam1|^2 * gd
    mean_num = a * lam1 + b * lam2  # (g1 lam1 + g2 lam2) * s
    cp = es.domain.closest
    dist = np.empty((n, n), dtype=object)
    dden = None
    rows_per = max(1, chunk // n)
    for c0 in range(0, n, rows_per):
        cs = np.arange(c0, min(n, c0 + rows_per))
        Q = (s * P[None, :, :] - mean_num[cs][:, None, :]).reshape(-1, P.shape[1])
        _, dn, dd, _ = cp.search(Q, s)
        dist[:, cs] = np.asarray(dn, dtype=object).reshape(len(cs), n).T
        dden = dd
    # cost = a b / s * e2/gd + s * dist/dden, all over den_w; scale by s*gd*dden
    C = (a * b * dden) * e2[None, :] + (s * s * gd) * dist
    scale = Fraction(1, s * gd * dden * den_w)
    g = 0
    for v in C.ravel():
        g = math.gcd(g, int(v))
        if g == 1:
            break
    if g > 1:
        C = C // g
        scale *= g
    Cmax = max(int(v) for v in C.ravel()) if C.size else 0
    if Cmax * n * 4 < 2**62:
        C = C.astype(np.int64)
    return C, scale


# ---------------------------------------------------------------------------
# Labelings


@dataclass(frozen=True)
class Labeling:
    """Shift-invariant labeling: ``points[k]`` is labeled by (lam1[k], lam2[k]).

    Labels of other points follow from alpha(p + t) = alpha(p) + t for t in
    the domain sublattice.
    """

    system: SublatticeSystem
    gamma1: Fraction
    gamma2: Fraction
    domain: Sublattice
    points: np.ndarray
    lam1: np.ndarray
    lam2: np.ndarray
    coset_ids: np.ndarray
    costs: tuple = field(repr=False)
    cost: Fraction = Fraction(0)

    @cached_property
    def _cosets(self) -> CosetMap:
        return self.domain.cosets

    @cached_property
    def _row_of(self) -> np.ndarray:
        ids = self._cosets.ids(self.points)
        row = np.full(self._cosets.index, -1, dtype=np.int64)
        row[ids] = np.arange(len(ids))
        if np.any(row < 0):
            raise ConstructionError("labeling does not cover every coset")
        return row

    @property
    def size(self) -> int:
        return len(self.points)

    def label(self, coeffs) -> tuple[np.ndarray, np.ndarray]:
        """alpha(lam) for rows of base coefficients."""
        P = np.atleast_2d(np.asarray(coeffs, dtype=np.int64))
        rows = self._row_of[self._cosets.ids(P)]
        shift = P - self.points[rows]
        return self.lam1[rows] + shift, self.lam2[rows] + shift

    def edges(self) -> list[Edge]:
        return [
            Edge(tuple(a), tuple(b), int(c))
            for a, b, c in zip(self.lam1.tolist(), self.lam2.tolist(), self.coset_ids.tolist())
        ]

    def side_sums(self) -> tuple[Fraction, Fraction]:
        """Sum over the domain cell of |lam - a_i(lam)|^2 (plain norms)."""
        s1 = sum(_sqnorms(self.system.base, self.points - self.lam1), Fraction(0))
        s2 = sum(_sqnorms(self.system.base, self.points - self.lam2), Fraction(0))
        return s1, s2

    def side_excess(self) -> tuple[Fraction, Fraction]:
        """Mean per-dimension excess distortion of each side decoder (unit scale)."""
        s1, s2 = self.side_sums()
        k = self.size * self.system.base.dim
        return s1 / k, s2 / k

    @property
    def table(self) -> dict:
        return {tuple(p): e for p, e in zip(self.points.tolist(), self.edges())}


def _solve_structure(es: EdgeStructure, g1, g2):
    C, scale = cost_matrix(es, g1, g2)
    a = hungarian(C)
    return C, scale, a


def _assemble(es: EdgeStructure, g1, g2, cols: np.ndarray) -> Labeling:
    """Labeling from an assignment of points to edge classes (minimizing shift applied)."""
    g1, g2 = _weights(g1, g2)
    a, b, _ = _integer_weights(g1, g2)
    s = a + b
    lam1, lam2, ids = es.edges
    P = es.points
    L1 = lam1[cols]
    L2 = lam2[cols]
    Q = s * P - (a * L1 + b * L2)
    near, _, _, _ = es.domain.closest.search(Q, s)
    near = np.asarray(near, dtype=np.int64)
    L1 = L1 + near
    L2 = L2 + near
    lat = es.base
    costs = tuple(edge_cost(lat, p, x, y, g1, g2) for p, x, y in zip(P.tolist(), L1.tolist(), L2.tolist()))
    return Labeling(es.system, g1, g2, es.domain, P, L1, L2, ids[cols], costs, sum(costs, Fraction(0)))


def solve_labeling(system: SublatticeSystem, g1, g2, reduce: bool = False) -> Labeling:
    """Optimal labeling of V0 (or of the lcm cell when ``reduce``).

    Among equal-cost optima the lexicographically smallest sequence of coset
    ids, with points in lexicographic order, is returned.
    """
    if reduce and system.lcm_sub is None:
        raise UnsupportedError("system has no lcm sublattice")
    es = EdgeStructure(system, system.lcm_sub if reduce else None)
    C, scale, a = _solve_structure(es, g1, g2)
    best = lexicographic_optimum(C, a)
    lab = _assemble(es, g1, g2, best.cols)
    if lab.cost != best.cost * scale:
        raise ConstructionError(f"assembled cost {lab.cost} differs from assignment optimum {best.cost * scale}")
    return lab


def labeling_cost_matrix(system: SublatticeSystem, g1, g2, reduce: bool = False):
    """Exact cost matrix as Fractions (for inspection and oracles)."""
    es = EdgeStructure(system, system.lcm_sub if reduce else None)
    C, scale = cost_matrix(es, g1, g2)
    return C, scale


def lcm_reduce(system: SublatticeSystem, reduced: Labeling) -> Labeling:
    """Expand a labeling periodic under the lcm sublattice to the V0 cell."""
    if system.lcm_sub is None:
        raise UnsupportedError("system has no lcm sublattice")
    if reduced.domain.basis != system.lcm_sub.basis:
        raise InputError("labeling is not defined on the lcm cell")
    es = EdgeStructure(system)
    P = es.V0
    L1, L2 = reduced.label(P)
    ids = es.class_id(L1, L2)
    lat = system.base
    g1, g2 = reduced.gamma1, reduced.gamma2
    costs = tuple(edge_cost(lat, p, x, y, g1, g2) for p, x, y in zip(P.tolist(), L1.tolist(), L2.tolist()))
    return Labeling(system, g1, g2, system.product, P, L1, L2, ids, costs, sum(costs, Fraction(0)))


# ---------------------------------------------------------------------------
# Alternative optima


def alternative_optima(system: SublatticeSystem, g1, g2, limit: int = 16) -> list[Labeling]:
    """Up to ``limit`` distinct optimal labelings (lexicographic order)."""
    es = EdgeStructure(system)
    C, scale, a = _solve_structure(es, g1, g2)
    return [_assemble(es, g1, g2, cols) for cols in enumerate_optima(C, limit, a)]


def extreme_optima(system: SublatticeSystem, g1, g2) -> tuple[Labeling, Labeling]:
    """The optimal labelings with the smallest and the largest side-1 distortion.

    Works on the equality subgraph of the optimal duals: every optimum is a
    perfect matching there, and a secondary assignment over it picks the
    extremes of the side-1 sum.
    """
    es = EdgeStructure(system)
    C, scale, a = _solve_structure(es, g1, g2)
    tight = a.tight(C)
    g1f, g2f = _weights(g1, g2)
    lam1, lam2, _ = es.edges
    n = len(es.points)
    aw, bw, _ = _integer_weights(g1f, g2f)
    s = aw + bw
    D1 = np.zeros((n, n), dtype=object)
    lat = es.base
    gd = exact.common_denominator(v for row in lat.gram for v in row)
    for c in range(n):
        Q = s * es.points - (aw * lam1[c] + bw * lam2[c])
        near, _, _, _ = es.domain.closest.search(Q, s)
        diff = es.points - (lam1[c] + np.asarray(near, dtype=np.int64))
        D1[:, c] = [int(v * gd) for v in _sqnorms(lat, diff)]
    out = []
    for sign in (1, -1):
        big = int(max(abs(int(v)) for v in D1.ravel()) + 1) * (n + 1)
        W = np.where(tight, sign * D1, big).astype(np.int64)
        sol = lexicographic_optimum(W)
        cols = sol.cols
        if not np.all(tight[np.arange(n), cols]):
            raise ConstructionError("secondary assignment left the optimal face")
        out.append(_assemble(es, g1, g2, cols))
    return out[0], out[1]


@dataclass(frozen=True)
class MixedLabelingReport:
    alpha: float
    d1: float
    d2: float
    d1_a: float
    d2_a: float
    d1_b: float
    d2_b: float
    cost: Fraction


def mix_labelings(lab_a: Labeling, lab_b: Labeling, alpha: float) -> MixedLabelingReport:
    """Time-share two equal-cost labelings: lab_a in proportion alpha."""
    if not 0 <= alpha <= 1:
        raise InputError("alpha must lie in [0, 1]")
    if lab_a.system is not lab_b.system and lab_a.system != lab_b.system:
        raise InputError("labelings belong to different systems")
    if lab_a.cost * lab_b.size != lab_b.cost * lab_a.size:
        raise InputError("labelings have different Lagrangian costs")
    a1, a2 = (float(v) for v in lab_a.side_excess())
    b1, b2 = (float(v) for v in lab_b.side_excess())
    return MixedLabelingReport(
        alpha, alpha * a1 + (1 - alpha) * b1, alpha * a2 + (1 - alpha) * b2, a1, a2, b1, b2, lab_a.cost
    )


def point(lat: Lattice, coeffs) -> LatticePoint:
    return lat.point([int(v) for v in coeffs])
