"""Similar sublattices, cleanliness, and the sublattice system used for labeling.

A sublattice is carried as integer rows (coefficients in the base lattice)
in Hermite normal form, so membership, cosets, intersections and joins are
all exact integer computations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import exact
from .errors import ConstructionError, InputError, ResourceError, UnsupportedError
from .lattice import ClosestPoints, Lattice, Similarity, index_of
from .rings import (
    EisensteinInt,
    GaussianInt,
    Quaternion,
    canonical,
    eisenstein_representable,
    elements_of_norm,
    factorize,
    four_squares,
    gcd_lcm,
    left_matrix,
    right_matrix,
    two_squares_representable,
)


# ---------------------------------------------------------------------------
# Cosets


class CosetMap:
    """Cosets of a coarse lattice inside a fine one via Smith normal form.

    Both lattices are given as integer rows in base coefficients.  A fine
    point with fine coordinates ``c`` has residue ``(c Q) mod d``; residues
    are flattened mixed-radix into ids ``0 .. index-1``.
    """

    def __init__(self, fine_basis, coarse_basis):
        self.fine = exact.as_int_matrix(fine_basis)
        self.coarse = exact.as_int_matrix(coarse_basis)
        L = len(self.fine)
        fdet = exact.det(self.fine)
        if fdet == 0 or exact.det(self.coarse) == 0:
            raise InputError("bases must be full rank")
        finv = exact.inverse(self.fine)
        M = exact.matmul(self.coarse, finv)
        if any(Fraction(v).denominator != 1 for row in M for v in row):
            raise InputError("coarse lattice is not contained in the fine lattice")
        d, _, Q = exact.smith_normal_form(M)
        self.d = [int(v) for v in d]
        self.index = math.prod(self.d)
        self.Q = np.array(Q, dtype=np.int64)
        self.Qinv = exact.int_inverse(Q)
        self.fdet = abs(int(fdet))
        sign = 1 if fdet > 0 else -1
        self.fadj = np.array([[int(v * fdet) * sign for v in row] for row in finv], dtype=np.int64)
        self.radix = np.array([math.prod(self.d[i + 1 :]) for i in range(L)], dtype=np.int64)

    def residues(self, coeffs) -> np.ndarray:
        C = np.atleast_2d(np.asarray(coeffs, dtype=np.int64))
        num = C @ self.fadj
        if np.any(num % self.fdet):
            raise InputError("point is not in the fine lattice")
        return (num // self.fdet) @ self.Q % np.array(self.d, dtype=np.int64)

    def ids(self, coeffs) -> np.ndarray:
        """Coset id of each row of base coefficients."""
        return self.residues(coeffs) @ self.radix

    def rep(self, k: int) -> tuple[int, ...]:
        r = []
        for i in range(len(self.d)):
            r.append((k // int(self.radix[i])) % self.d[i])
        return tuple(exact.vecmat(exact.vecmat(r, self.Qinv), self.fine))

    def reps(self) -> np.ndarray:
        """One base-coefficient representative per coset, ordered by id."""
        grids = [range(di) for di in self.d]
        R = np.array(list(itertools.product(*grids)), dtype=np.int64).reshape(-1, len(self.d))
        return R @ np.array(self.Qinv, dtype=np.int64) @ np.array(self.fine, dtype=np.int64)


# ---------------------------------------------------------------------------
# Sublattices


@dataclass(frozen=True)
class Sublattice:
    """Full-rank sublattice of ``base`` spanned by integer coefficient rows."""

    base: Lattice
    basis: tuple
    similarity: Similarity | None = None
    xi: object = None

    def __post_init__(self):
        B = exact.hnf(self.basis)
        if len(B) != self.base.dim:
            raise InputError("sublattice basis must have full rank")
        object.__setattr__(self, "basis", B)

    @cached_property
    def index(self) -> int:
        return abs(int(exact.det(self.basis)))

    @property
    def dim(self) -> int:
        return self.base.dim

    @cached_property
    def gram(self):
        return exact.matmul(exact.matmul(self.basis, self.base.gram), exact.transpose(self.basis))

    @cached_property
    def covering_radius_sq(self) -> Fraction | None:
        if self.similarity is None:
            return None
        return self.similarity.scale_sq * self.base.covering_radius_sq

    @cached_property
    def closest(self) -> ClosestPoints:
        return ClosestPoints(self.basis, self.base.gram, self.covering_radius_sq)

    @cached_property
    def cosets(self) -> CosetMap:
        return CosetMap(exact.identity(self.dim), self.basis)

    def contains(self, coeffs) -> bool:
        return bool(np.all(self.cosets.ids(coeffs) == 0))

    def contains_lattice(self, other: "Sublattice") -> bool:
        return self.contains(np.array(other.basis, dtype=np.int64))

    @property
    def generator_float(self) -> np.ndarray:
        return np.array(self.basis, dtype=float) @ self.base.generator_float

    def __repr__(self):
        return f"Sublattice(index={self.index}, xi={self.xi}, basis={self.basis})"


def whole(base: Lattice) -> Sublattice:
    return Sublattice(base, tuple(tuple(r) for r in exact.identity(base.dim)), Similarity(exact.identity(base.dim), 1), 1)


def _check_ring(base: Lattice, xi):
    if isinstance(xi, bool):
        raise InputError("booleans are not ring elements")
    if isinstance(xi, int):
        return
    if base.kind == "Zn" and base.dim == 2 and isinstance(xi, GaussianInt):
        return
    if base.kind == "A2" and isinstance(xi, EisensteinInt):
        return
    if isinstance(xi, Quaternion) and (base.kind == "D4" or base.kind == "Zn" and base.dim % 4 == 0):
        return
    raise InputError(f"ring element {xi!r} does not act on {base.kind} of dimension {base.dim}")


def multiplier(base: Lattice, xi, side: str = "left"):
    """(U, c^2) for multiplication of ``base`` by ``xi``.

    ``side='left'`` gives xi*Lambda and ``'right'`` gives Lambda*xi; the two
    only differ for quaternions.
    """
    _check_ring(base, xi)
    if side not in ("left", "right"):
        raise InputError("side must be 'left' or 'right'")
    if not xi:
        raise InputError("ring element must be nonzero")
    L = base.dim
    if isinstance(xi, int):
        return [[xi * int(i == j) for j in range(L)] for i in range(L)], Fraction(xi * xi)
    if isinstance(xi, (GaussianInt, EisensteinInt)):
        return [list(r) for r in xi.matrix()], Fraction(xi.norm())
    M = left_matrix(xi) if side == "left" else right_matrix(xi)
    if base.kind == "D4":
        G = [[Fraction(v) for v in row] for row in base.generator]
        U = exact.matmul(exact.matmul(G, M), exact.inverse(G))
    else:
        U = [[Fraction(0)] * L for _ in range(L)]
        for blk in range(0, L, 4):
            for i in range(4):
                for j in range(4):
                    U[blk + i][blk + j] = Fraction(M[i][j])
    if any(v.denominator != 1 for row in U for v in row):
        raise InputError(f"{xi} does not map {base.kind} into itself")
    return [[int(v) for v in row] for row in U], xi.norm()


def similar_sublattice(base: Lattice, xi, side: str = "left") -> Sublattice:
    """xi*Lambda (or Lambda*xi) with its similarity record."""
    U, c2 = multiplier(base, xi, side)
    sim = Similarity(U, c2)
    if not sim.check(base):
        raise ConstructionError(f"multiplication by {xi} is not a similarity of {base.kind}")
    sub = Sublattice(base, tuple(tuple(r) for r in U), sim, xi)
    if sub.index != index_of(sim, base.dim):
        raise ConstructionError("index mismatch for similar sublattice")
    return sub


def meet(a: Sublattice, b: Sublattice) -> Sublattice:
    """Intersection of two sublattices of the same base."""
    K = exact.left_kernel(list(a.basis) + [[-v for v in r] for r in b.basis])
    L = a.dim
    rows = [exact.vecmat(k[:L], a.basis) for k in K]
    return Sublattice(a.base, tuple(tuple(r) for r in exact.hnf(rows)))


def join(a: Sublattice, b: Sublattice) -> Sublattice:
    """Smallest lattice containing both."""
    return Sublattice(a.base, exact.hnf(list(a.basis) + list(b.basis)))


# ---------------------------------------------------------------------------
# Cleanliness


def _as_fine(fine) -> tuple:
    if isinstance(fine, Lattice):
        return tuple(tuple(r) for r in exact.identity(fine.dim))
    return fine.basis


def find_tie(fine, coarse: Sublattice):
    """A point of ``fine`` equidistant from two nearest points of ``coarse``, or None.

    Every coset of fine/coarse is tested once; ties are invariant under
    coarse shifts so this is exhaustive.
    """
    cm = CosetMap(_as_fine(fine), coarse.basis)
    reps = cm.reps()
    _, _, _, ties = coarse.closest.search(reps)
    bad = np.nonzero(ties > 1)[0]
    if len(bad):
        return tuple(int(v) for v in reps[bad[0]])
    return None


def is_clean(fine, coarse: Sublattice) -> bool:
    """True iff no point of ``fine`` lies on a Voronoi boundary of ``coarse``."""
    return find_tie(fine, coarse) is None


# ---------------------------------------------------------------------------
# Catalogs


def _primes_ok(n: int, good) -> bool:
    return all(good(p) for p in factorize(n)) if n > 1 else True


def similar_index_catalog(kind: str, L: int, limit: int) -> list[int]:
    """Indices <= limit of geometrically similar sublattices."""
    if limit < 1:
        raise InputError("limit must be >= 1")
    if kind == "Zn":
        if L == 1:
            return list(range(1, limit + 1))
        if L == 2:
            return [n for n in range(1, limit + 1) if two_squares_representable(n)[0]]
        p = L // 2 if L % 4 == 0 else L if L % 2 else None
        if p is None:
            raise UnsupportedError(f"Z^{L} similar sublattices are not catalogued")
        return [m**p for m in range(1, limit + 1) if m**p <= limit]
    if kind == "A2":
        return [n for n in range(1, limit + 1) if eisenstein_representable(n)[0]]
    if kind == "D4":
        return [m * m for m in range(1, limit + 1) if m * m <= limit]
    raise InputError(f"unsupported lattice kind {kind!r}")


def d4_clean_family(M: int) -> bool:
    """M = 7 or a product of primes congruent to 1 mod 4."""
    return M == 7 or _primes_ok(M, lambda p: p % 4 == 1)


def clean_index_catalog(kind: str, L: int, limit: int) -> list[int]:
    """Indices of clean similar sublattices given by the number-theoretic rules.

    For D4 the limit applies to M and the returned indices are M^2.
    """
    if kind == "Zn":
        return [n for n in similar_index_catalog(kind, L, limit) if n % 2 == 1]
    if kind == "A2":
        if limit < 1:
            raise InputError("limit must be >= 1")
        return [n for n in range(1, limit + 1) if _primes_ok(n, lambda p: p % 6 == 1)]
    if kind == "D4":
        if limit < 1:
            raise InputError("limit must be >= 1")
        return [m * m for m in range(1, limit + 1) if d4_clean_family(m)]
    raise InputError(f"unsupported lattice kind {kind!r}")


def d4_witness(M: int) -> Quaternion:
    """A Hurwitz quaternion of norm M whose right multiple of D4 is clean when possible."""
    if M == 1:
        return Quaternion(1, 0, 0, 0)
    if M == 7:
        return Quaternion.hurwitz(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(5, 2))
    if d4_clean_family(M):
        for p in range(0, math.isqrt(M) + 1, 2):
            q2 = M - p * p
            q = math.isqrt(q2)
            if q * q == q2 and q % 2 == 1 and math.gcd(p, q) == 1:
                return Quaternion.d4_form(p + q, abs(p - q))
    return Quaternion(*four_squares(M))


def witnesses(kind: str, L: int, N: int) -> list:
    """Candidate ring elements generating similar sublattices of index N."""
    if kind == "Zn" and L == 1:
        return [N]
    if kind == "Zn" and L == 2:
        return elements_of_norm("G", N)
    if kind == "A2":
        return elements_of_norm("J", N)
    if kind == "Zn" and L % 4 == 0:
        m = round(N ** (2 / L))
        return [Quaternion(*four_squares(m))] if m ** (L // 2) == N else []
    if kind == "Zn" and L % 2 == 1:
        m = round(N ** (1 / L))
        return [m] if m**L == N else []
    if kind == "D4":
        m = math.isqrt(N)
        return [d4_witness(m)] if m * m == N else []
    raise UnsupportedError(f"no witnesses for {kind} in dimension {L}")


@dataclass(frozen=True)
class CatalogRow:
    kind: str
    L: int
    N: int
    xi: object
    clean: bool


def catalog_rows(kind: str, L: int, limit: int) -> list[CatalogRow]:
    """One row per similar index: a witness and whether its sublattice is clean.

    For A2 the first clean witness is preferred.  For D4 the limit applies to M.
    """
    from .lattice import make_lattice

    base = make_lattice(kind, L)
    if kind == "D4":
        indices = [m * m for m in range(1, limit + 1)]
    else:
        indices = similar_index_catalog(kind, L, limit)
    rows = []
    for N in indices:
        cands = witnesses(kind, L, N)
        chosen, clean = None, False
        for xi in cands:
            side = "right" if kind == "D4" else "left"
            sub = similar_sublattice(base, xi, side)
            ok = is_clean(base, sub)
            if chosen is None or ok:
                chosen, clean = xi, ok
            if ok:
                break
        if chosen is not None:
            rows.append(CatalogRow(kind, L, N, chosen, clean))
    return rows


# ---------------------------------------------------------------------------
# Exhaustive D4 search


@dataclass(frozen=True)
class CleanSearchResult:
    M: int
    exists_clean: bool
    n_vectors: int
    n_tuples: int
    n_sublattices: int
    clean_bases: tuple
    tied_points: tuple = field(default=(), repr=False)

    @property
    def witness(self):
        return self.clean_bases[0] if self.clean_bases else None


def d4_vectors_of_norm(n: int) -> np.ndarray:
    """Coefficient rows (w.r.t. the D4 generator) of all vectors of squared norm n."""
    from .lattice import D4_GENERATOR

    r = math.isqrt(n)
    rng = np.arange(-r, r + 1)
    X = np.array(np.meshgrid(rng, rng, rng, rng, indexing="ij")).reshape(4, -1).T
    X = X[((X * X).sum(axis=1) == n) & (X.sum(axis=1) % 2 == 0)]
    ginv = exact.inverse(D4_GENERATOR)
    den = exact.common_denominator(v for row in ginv for v in row)
    gi = np.array([[int(v * den) for v in row] for row in ginv], dtype=np.int64)
    C = X @ gi
    assert not np.any(C % den)
    return C // den


def exhaustive_clean_search_D4(M: int, cap: int = 2_000_000) -> CleanSearchResult:
    """Enumerate every similar sublattice of D4 of index M^2 and test each for cleanliness.

    Sublattices are found as 4-tuples of vectors of norm 2M with the Gram
    matrix of the D4 Coxeter diagram scaled by M (v1 is the central node).
    """
    from .lattice import d4_lattice

    if M < 1:
        raise InputError("M must be positive")
    base = d4_lattice()
    A = np.array(base.gram, dtype=object).astype(np.int64)
    V = d4_vectors_of_norm(2 * M)
    ip = V @ A @ V.T
    seen = {}
    n_tuples = 0
    for i1 in range(len(V)):
        nbr = np.nonzero(ip[i1] == -M)[0]
        for i2 in nbr:
            for i3 in nbr:
                if ip[i2, i3] != 0:
                    continue
                for i4 in nbr:
                    if ip[i2, i4] != 0 or ip[i3, i4] != 0:
                        continue
                    n_tuples += 1
                    if n_tuples > cap:
                        raise ResourceError(f"more than {cap} candidate tuples for M={M}")
                    key = exact.hnf(V[[i1, i2, i3, i4]].tolist())
                    seen.setdefault(key, None)
    clean, ties = [], []
    for key in sorted(seen):
        sub = Sublattice(base, key)
        if sub.index != M * M:
            raise ConstructionError(f"Coxeter tuple gave index {sub.index}, expected {M * M}")
        t = find_tie(base, sub)
        if t is None:
            clean.append(key)
        else:
            ties.append(t)
    return CleanSearchResult(M, bool(clean), len(V), n_tuples, len(seen), tuple(clean), tuple(ties))


# ---------------------------------------------------------------------------
# The sublattice system


@dataclass(frozen=True)
class SublatticeSystem:
    base: Lattice
    sub1: Sublattice
    sub2: Sublattice
    meet: Sublattice
    join: Sublattice
    product: Sublattice
    lcm_sub: Sublattice | None
    xi1: object
    xi2: object

    @property
    def N1(self) -> int:
        return self.sub1.index

    @property
    def N2(self) -> int:
        return self.sub2.index

    @property
    def N_cap(self) -> int:
        return self.meet.index

    @property
    def N_join(self) -> int:
        return self.join.index

    @property
    def N_s(self) -> int:
        return self.product.index

    @property
    def N_lcm(self) -> int | None:
        return None if self.lcm_sub is None else self.lcm_sub.index

    def check(self):
        """Raise ConstructionError if an index identity or inclusion fails."""
        if self.N_s != self.N1 * self.N2:
            raise ConstructionError(f"[L:Ls]={self.N_s} differs from N1*N2={self.N1 * self.N2}")
        if self.N1 * self.N2 != self.N_join * self.N_cap:
            raise ConstructionError("det L1 det L2 != det join det meet")
        # [join:L1] = [L2:meet] and [join:L2] = [L1:meet], as index quotients
        for a, b in ((self.N1, self.N2), (self.N2, self.N1)):
            if a % self.N_join or self.N_cap % b or a // self.N_join != self.N_cap // b:
                raise ConstructionError("second isomorphism identity failed")
        if not (self.meet.contains_lattice(self.product) and self.sub1.contains_lattice(self.meet) and self.sub2.contains_lattice(self.meet)):
            raise ConstructionError("product/meet inclusions failed")
        if self.lcm_sub is not None:
            ok = (
                self.lcm_sub.contains_lattice(self.product)
                and self.sub1.contains_lattice(self.lcm_sub)
                and self.sub2.contains_lattice(self.lcm_sub)
                and self.N_lcm == math.lcm(self.N1, self.N2)
            )
            if not ok:
                raise ConstructionError("lcm sublattice requirements failed")
        return True


def _coerce(base: Lattice, xi):
    if isinstance(xi, int) and not isinstance(xi, bool):
        if base.kind == "Zn" and base.dim == 2:
            return GaussianInt(xi, 0)
        if base.kind == "A2":
            return EisensteinInt(xi, 0)
    return xi


def _d4_form_params(q: Quaternion):
    if not isinstance(q, Quaternion) or q.w != q.x or q.y != q.z:
        return None
    a, b = 2 * q.w, 2 * q.y
    if a.denominator != 1 or b.denominator != 1:
        return None
    a, b = int(a), int(b)
    if a <= 0 or b <= 0 or a % 2 == 0 or b % 2 == 0:
        return None
    return a, b


def _lcm_candidates(base: Lattice, xi_cap, target: int):
    """Similar sublattices eta*Lambda with eta a multiple of xi_cap and index target."""
    n_cap = xi_cap.norm() if not isinstance(xi_cap, int) else abs(xi_cap)
    if target % n_cap:
        return []
    ring = "G" if isinstance(xi_cap, GaussianInt) else "J"
    return [xi_cap * d for d in elements_of_norm(ring, target // n_cap)]


def build_system(base: Lattice, xi1, xi2) -> SublatticeSystem:
    """Lambda_1 = xi1*Lambda, Lambda_2 = xi2*Lambda (Lambda*xi2 for quaternions), with
    meet, join, product and, when one qualifies, an lcm sublattice."""
    xi1, xi2 = _coerce(base, xi1), _coerce(base, xi2)
    quaternionic = isinstance(xi1, Quaternion) or isinstance(xi2, Quaternion)
    if quaternionic:
        xi1 = xi1 if isinstance(xi1, Quaternion) else Quaternion(xi1, 0, 0, 0)
        xi2 = xi2 if isinstance(xi2, Quaternion) else Quaternion(xi2, 0, 0, 0)
        n1, n2 = xi1.norm(), xi2.norm()
        if n1.denominator != 1 or n2.denominator != 1 or math.gcd(int(n1), int(n2)) != 1:
            raise InputError("quaternion norms must be coprime integers")
        if base.kind == "Zn":
            if base.dim != 4:
                raise UnsupportedError("quaternionic systems are built for Z^4 and D4 only")
            if xi1.ring_tag != "Lipschitz" or xi2.ring_tag != "Lipschitz" or n1 % 2 == 0 or n2 % 2 == 0:
                raise InputError("Z^4 needs Lipschitz quaternions with odd norms")
        elif base.kind == "D4":
            p1, p2 = _d4_form_params(xi1), _d4_form_params(xi2)
            if p1 is None or p2 is None:
                raise InputError("D4 needs quaternions (a/2)(1+i)+(b/2)(j+k) with a, b odd and positive")
            if math.gcd(*p1) != 1 or math.gcd(*p2) != 1:
                raise InputError("gcd(alpha, beta) must be 1 for both quaternions")
        else:
            raise InputError(f"quaternions do not act on {base.kind}")
        sub1 = similar_sublattice(base, xi1, "left")
        sub2 = similar_sublattice(base, xi2, "right")
        U1, c1 = multiplier(base, xi1, "left")
        U2, c2 = multiplier(base, xi2, "right")
        Us = exact.matmul(U1, U2)
        product = Sublattice(base, tuple(tuple(r) for r in Us), Similarity(Us, c1 * c2), (xi1, xi2))
        mt = meet(sub1, sub2)
        jn = join(sub1, sub2)
        if mt.basis != product.basis:
            raise ConstructionError("expected the product sublattice to equal the intersection")
        mt = product
    else:
        for x in (xi1, xi2):
            _check_ring(base, x)
            if not x:
                raise InputError("ring elements must be nonzero")
        ring = {"Zn": "Z", "A2": "J"}[base.kind] if base.dim == 1 or base.kind == "A2" else "G"
        if base.kind == "Zn" and base.dim not in (1, 2):
            raise UnsupportedError("commutative systems are built for Z, Z^2 and A2")
        if ring == "Z" and not (isinstance(xi1, int) and isinstance(xi2, int)):
            raise InputError("Z needs rational integers")
        g, l = gcd_lcm(ring, xi1, xi2)
        sub1 = similar_sublattice(base, xi1)
        sub2 = similar_sublattice(base, xi2)
        jn = similar_sublattice(base, g)
        mt = similar_sublattice(base, l)
        product = similar_sublattice(base, xi1 * xi2)
        if mt.basis != meet(sub1, sub2).basis or jn.basis != join(sub1, sub2).basis:
            raise ConstructionError("gcd/lcm sublattices disagree with the generic meet/join")
    system = SublatticeSystem(base, sub1, sub2, mt, jn, product, None, xi1, xi2)
    system.check()
    lcm_sub = _find_lcm_sub(system)
    system = SublatticeSystem(base, sub1, sub2, mt, jn, product, lcm_sub, xi1, xi2)
    system.check()
    return system


def _find_lcm_sub(system: SublatticeSystem) -> Sublattice | None:
    target = math.lcm(system.N1, system.N2)
    if system.base.dim == 1:
        return system.meet
    if target == system.N_s:
        cands = [system.product]
    elif isinstance(system.xi1, (GaussianInt, EisensteinInt)):
        _, l = gcd_lcm("G" if isinstance(system.xi1, GaussianInt) else "J", system.xi1, system.xi2)
        cands = [similar_sublattice(system.base, eta) for eta in _lcm_candidates(system.base, l, target)]
    else:
        return None
    for cand in cands:
        if not cand.contains_lattice(system.product):
            continue
        if not (system.sub1.contains_lattice(cand) and system.sub2.contains_lattice(cand)):
            continue
        if is_clean(system.sub1, cand) and is_clean(system.sub2, cand):
            return cand
    return None
