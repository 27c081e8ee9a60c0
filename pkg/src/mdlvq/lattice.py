"""Base lattices (Z^n, A2, D4) and their geometric primitives.

Points are stored by integer coefficient vectors with respect to the rows of
the generator matrix.  Squared lengths are evaluated exactly through the
rational Gram matrix, so every tie test is free of rounding.  Real-valued
work (source sampling, Monte-Carlo integration) goes through numpy.

Squared norms returned by this module are plain Euclidean (sum of squares);
the dimension-normalized norm used for distortions is that value divided by
the dimension.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import exact
from .errors import InputError

KINDS = ("Zn", "A2", "D4")


class QSqrt3:
    """Exact element a + b*sqrt(3) of Q(sqrt 3); only what A2 coordinates need."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _lift(x):
        return x if isinstance(x, QSqrt3) else QSqrt3(x)

    def __add__(self, other):
        o = self._lift(other)
        return QSqrt3(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt3(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return QSqrt3(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QSqrt3)):
            o = self._lift(other)
            return self.a == o.a and self.b == o.b
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(3.0)

    def rational(self) -> Fraction:
        if self.b:
            raise ValueError(f"{self!r} is irrational")
        return self.a

    def __repr__(self):
        return f"QSqrt3({self.a}, {self.b})"


def _to_rational(v) -> Fraction:
    return v.rational() if isinstance(v, QSqrt3) else Fraction(v)


@dataclass(frozen=True)
class LatticePoint:
    coeffs: tuple[int, ...]
    coords: tuple

    def __iter__(self):
        return iter(self.coeffs)


@dataclass(frozen=True)
class Lattice:
    """A full-rank lattice of one of the supported kinds.

    ``generator`` rows span the lattice; ``scale`` multiplies the canonical
    generator of the kind.  ``covering_radius_sq`` is the plain squared
    covering radius.
    """

    kind: str
    dim: int
    scale: Fraction = Fraction(1)
    generator: tuple = field(init=False, repr=False, compare=False)
    gram: tuple = field(init=False, repr=False, compare=False)
    covering_radius_sq: Fraction = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unsupported lattice kind {self.kind!r}")
        if self.kind == "A2" and self.dim != 2 or self.kind == "D4" and self.dim != 4:
            raise InputError(f"{self.kind} has fixed dimension")
        if self.dim < 1:
            raise InputError("dimension must be positive")
        s = Fraction(self.scale)
        if s <= 0:
            raise InputError("scale must be positive")
        object.__setattr__(self, "scale", s)
        if self.kind == "Zn":
            G = [[s * int(i == j) for j in range(self.dim)] for i in range(self.dim)]
            rho = Fraction(self.dim, 4)
        elif self.kind == "A2":
            G = [[QSqrt3(s), QSqrt3(0)], [QSqrt3(-s / 2), QSqrt3(0, s / 2)]]
            rho = Fraction(1, 3)
        else:
            G = [[s * v for v in row] for row in D4_GENERATOR]
            rho = Fraction(1)
        G = tuple(tuple(r) for r in G)
        gram = tuple(
            tuple(_to_rational(sum((a * b for a, b in zip(G[i], G[j])), Fraction(0))) for j in range(self.dim))
            for i in range(self.dim)
        )
        object.__setattr__(self, "generator", G)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "covering_radius_sq", rho * s * s)

    @property
    def L(self) -> int:
        return self.dim

    @cached_property
    def det_gram(self) -> Fraction:
        return Fraction(exact.det(self.gram))

    @cached_property
    def volume(self) -> float:
        """Volume of a fundamental cell, sqrt(det A)."""
        return math.sqrt(self.det_gram)

    @cached_property
    def generator_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.generator])

    @cached_property
    def gram_float(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.gram])

    def point(self, coeffs: Sequence[int]) -> LatticePoint:
        c = tuple(int(v) for v in coeffs)
        if len(c) != self.dim:
            raise InputError("coefficient vector has wrong length")
        coords = tuple(sum((c[i] * self.generator[i][j] for i in range(self.dim)), Fraction(0)) for j in range(self.dim))
        return LatticePoint(c, coords)

    def sqnorm(self, coeffs: Sequence) -> Fraction:
        """Exact plain squared length of the vector with these coefficients."""
        return Fraction(exact.quad_form(list(coeffs), self.gram))

    def norm2(self, coeffs: Sequence) -> Fraction:
        """Dimension-normalized squared length (1/L) * sum x_i^2."""
        return self.sqnorm(coeffs) / self.dim

    def scaled(self, s) -> "Lattice":
        return Lattice(self.kind, self.dim, self.scale * Fraction(s))


D4_GENERATOR = (
    (1, 1, 0, 0),
    (-1, 0, 1, 0),
    (0, -1, 0, 1),
    (0, -1, 0, -1),
)


def integer_lattice(L: int, scale=1) -> Lattice:
    return Lattice("Zn", L, Fraction(scale))


def hexagonal_lattice(scale=1) -> Lattice:
    return Lattice("A2", 2, Fraction(scale))


def d4_lattice(scale=1) -> Lattice:
    return Lattice("D4", 4, Fraction(scale))


def make_lattice(kind: str, dim: int | None = None) -> Lattice:
    if kind == "Zn":
        if dim is None:
            raise InputError("Zn needs a dimension")
        return integer_lattice(dim)
    if kind == "A2":
        return hexagonal_lattice()
    if kind == "D4":
        return d4_lattice()
    raise InputError(f"unsupported lattice kind {kind!r}")


@dataclass(frozen=True)
class Similarity:
    """Integer matrix U with U G = c G K, c > 0, K orthogonal with det K = +1.

    ``scale_sq`` holds c^2, which is rational even when c is not.
    """

    U: tuple[tuple[int, ...], ...]
    scale_sq: Fraction

    def __post_init__(self):
        object.__setattr__(self, "U", exact.as_int_matrix(self.U))
        object.__setattr__(self, "scale_sq", Fraction(self.scale_sq))

    def check(self, lat: Lattice) -> bool:
        """Exact test of the similarity relation against ``lat``."""
        L = lat.dim
        if len(self.U) != L:
            return False
        UA = exact.matmul(exact.matmul(self.U, lat.gram), exact.transpose(self.U))
        if any(UA[i][j] != self.scale_sq * lat.gram[i][j] for i in range(L) for j in range(L)):
            return False
        d = exact.det(self.U)
        return d > 0 and Fraction(d) ** 2 == self.scale_sq**L

    def rotation(self, lat: Lattice) -> np.ndarray:
        """K = G^-1 U G / c as floats (entries are generally irrational)."""
        G = lat.generator_float
        return np.linalg.solve(G, np.array(self.U, dtype=float) @ G) / math.sqrt(self.scale_sq)


def index_of(sim: Similarity, L: int) -> int:
    """Index [Lambda : U Lambda] = det U = c^L."""
    if len(sim.U) != L:
        raise InputError("similarity matrix has wrong size")
    d = exact.det(sim.U)
    if d <= 0 or Fraction(d) ** 2 != sim.scale_sq**L:
        raise InputError(f"similarity invariant violated: det U = {d}, c^2 = {sim.scale_sq}")
    return int(d)


# ---------------------------------------------------------------------------
# Exact closest-vector search in coefficient space


def _round_div(num, den):
    """round(num/den) with halves rounded up; works on ints and int arrays (den > 0)."""
    return (2 * num + den) // (2 * den)


class ClosestPoints:
    """Exact nearest sublattice points for rational query points.

    ``basis`` holds integer rows (coefficients in the base lattice) spanning a
    full-rank sublattice; the search is a box enumeration around Babai
    rounding whose width is derived from a proven covering-radius bound, so
    no nearest candidate is missed.  All distance comparisons are integer.
    """

    def __init__(self, basis, gram, covering_sq: Fraction | None = None):
        self.dim = len(basis)
        self.input_basis = exact.as_int_matrix(basis)
        red = exact.lll(self.input_basis, gram)
        self.basis = np.array(red, dtype=np.int64)
        self._basis_py = [list(r) for r in red]
        self.gram = exact.as_frac_matrix(gram)
        subgram = exact.matmul(exact.matmul(red, self.gram), exact.transpose(red))
        self.gram_den = exact.common_denominator(v for row in subgram for v in row)
        self.subgram_int = [[int(v * self.gram_den) for v in row] for row in subgram]
        d = int(exact.det(red))
        self.det = abs(d)
        inv = exact.inverse(red)
        self.adj = [[int(v * d) * (1 if d > 0 else -1) for v in row] for row in inv]
        bound = sum(exact.gram_schmidt_sq(red, self.gram)) / 4
        if covering_sq is not None:
            bound = min(bound, Fraction(covering_sq))
        self.covering_bound = bound
        ginv = np.linalg.inv(np.array(subgram, dtype=float))
        widths = [math.sqrt(float(bound) * ginv[i, i]) * (1 + 1e-9) + 1e-9 for i in range(self.dim)]
        radii = [int(math.floor(w + 0.5)) for w in widths]
        self.offsets = np.array(list(itertools.product(*[range(-r, r + 1) for r in radii])), dtype=np.int64)

    def _coerce(self, points, den):
        pts = np.asarray(points, dtype=object) if not isinstance(points, np.ndarray) else points
        pts = np.atleast_2d(pts)
        return pts, int(den)

    def search(self, points, den: int = 1):
        """Nearest sublattice points to ``points / den`` (rows of integer numerators).

        Returns ``(nearest, dist_num, dist_den, ties)``: nearest points as an
        int array of base coefficients, exact squared distances
        ``dist_num / dist_den`` and the number of minimizers per query.
        """
        pts, den = self._coerce(points, den)
        k = pts.shape[0]
        if k == 0:
            return np.zeros((0, self.dim), dtype=np.int64), np.zeros(0, dtype=np.int64), 1, np.zeros(0, dtype=np.int64)
        D = den * self.det
        big = self._needs_object(pts, D)
        dt = object if big else np.int64
        P = np.array(pts.tolist(), dtype=dt)
        adj = np.array(self.adj, dtype=dt)
        T = P @ adj
        u0 = _round_div(T, D)
        offs = self.offsets.astype(dt)
        U = u0[:, None, :] + offs[None, :, :]
        E = T[:, None, :] - D * U
        dist = np.zeros(E.shape[:2], dtype=dt)
        for i in range(self.dim):
            for j in range(self.dim):
                g = self.subgram_int[i][j]
                if g:
                    dist = dist + g * E[:, :, i] * E[:, :, j]
        best = dist.min(axis=1)
        is_best = dist == best[:, None]
        ties = is_best.sum(axis=1)
        arg = is_best.argmax(axis=1)
        Ub = U[np.arange(k), arg]
        basis = self.basis.astype(dt)
        nearest = Ub @ basis
        multi = np.nonzero(ties > 1)[0]
        for q in multi:
            cands = [tuple(int(v) for v in (U[q, m] @ basis)) for m in np.nonzero(is_best[q])[0]]
            nearest[q] = min(cands)
        dist_den = self.gram_den * D * D
        return nearest.astype(np.int64) if not big else nearest, best, dist_den, ties

    def _needs_object(self, pts, D) -> bool:
        pmax = max((abs(int(v)) for v in np.asarray(pts).ravel()), default=0) + 1
        amax = max(abs(v) for row in self.adj for v in row) + 1
        tmax = pmax * amax * self.dim + D * (int(np.abs(self.offsets).max(initial=0)) + 2)
        emax = 2 * tmax + D
        gmax = max(abs(v) for row in self.subgram_int for v in row) + 1
        return emax * emax * gmax * self.dim * self.dim >= 2**62

    def nearest_exact(self, coeffs, den: int = 1):
        """All minimizers for one query, as a sorted list of coefficient tuples."""
        pts, den = self._coerce([list(coeffs)], den)
        D = den * self.det
        T = [sum(int(pts[0][i]) * self.adj[i][j] for i in range(self.dim)) for j in range(self.dim)]
        u0 = [_round_div(t, D) for t in T]
        best = None
        winners = []
        for off in self.offsets.tolist():
            u = [a + b for a, b in zip(u0, off)]
            e = [t - D * v for t, v in zip(T, u)]
            dist = sum(self.subgram_int[i][j] * e[i] * e[j] for i in range(self.dim) for j in range(self.dim))
            if best is None or dist < best:
                best, winners = dist, [u]
            elif dist == best:
                winners.append(u)
        pts_out = sorted(tuple(exact.vecmat(u, self._basis_py)) for u in winners)
        return pts_out, Fraction(best, self.gram_den * D * D)


def _closest_for(lat: Lattice) -> ClosestPoints:
    cache = _CLOSEST_CACHE.get(lat)
    if cache is None:
        cache = ClosestPoints(exact.identity(lat.dim), lat.gram, lat.covering_radius_sq)
        _CLOSEST_CACHE[lat] = cache
    return cache


_CLOSEST_CACHE: dict = {}


def nearest_point(lat: Lattice, x: Sequence) -> LatticePoint:
    """Closest lattice point to ``x`` (coordinates), ties -> smallest coefficients.

    Rational input on a lattice with rational generator is handled exactly;
    anything else is evaluated in floating point over the same candidate set.
    """
    if len(x) != lat.dim:
        raise InputError(f"expected a vector of length {lat.dim}, got {len(x)}")
    if lat.kind != "A2" and all(isinstance(v, (int, Fraction)) for v in x):
        ginv = exact.inverse(lat.generator)
        t = exact.vecmat([Fraction(v) for v in x], ginv)
        den = exact.common_denominator(t)
        num = [int(v * den) for v in t]
        winners, _ = _closest_for(lat).nearest_exact(num, den)
        return lat.point(winners[0])
    xf = np.asarray([float(v) for v in x], dtype=float)
    if not np.all(np.isfinite(xf)):
        raise InputError("input must be finite")
    G = lat.generator_float
    t = np.linalg.solve(G.T, xf)
    cp = _closest_for(lat)
    cands = np.rint(t).astype(np.int64)[None, :] + cp.offsets
    diff = xf[None, :] - cands @ G
    d = np.einsum("ij,ij->i", diff, diff)
    m = d.min()
    winners = sorted(tuple(int(v) for v in c) for c in cands[d == m])
    return lat.point(winners[0])


def quantize(lat: Lattice, X: np.ndarray) -> np.ndarray:
    """Vectorized closest-point rule; returns integer coefficients (n x L).

    Z^n rounds coordinatewise, D4 uses the even-parity flip of the worst
    coordinate and A2 takes the better of its two rectangular cosets.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != lat.dim:
        raise InputError(f"expected vectors of length {lat.dim}")
    Y = X / float(lat.scale)
    if lat.kind == "Zn":
        return np.rint(Y).astype(np.int64)
    if lat.kind == "D4":
        f = np.rint(Y)
        odd = (f.sum(axis=1) % 2) != 0
        if odd.any():
            Yo = Y[odd]
            fo = f[odd]
            delta = Yo - fo
            k = np.argmax(np.abs(delta), axis=1)
            rows = np.arange(len(k))
            step = np.where(delta[rows, k] >= 0, 1.0, -1.0)
            fo[rows, k] += step
            f[odd] = fo
        ginv = np.linalg.inv(np.array(D4_GENERATOR, dtype=float))
        return np.rint(f @ ginv).astype(np.int64)
    # A2: R = Z x sqrt(3)Z and R + (1/2, sqrt(3)/2)
    r3 = math.sqrt(3.0)
    a = np.stack([np.rint(Y[:, 0]), r3 * np.rint(Y[:, 1] / r3)], axis=1)
    sh = np.array([0.5, r3 / 2])
    b = np.stack([np.rint(Y[:, 0] - 0.5), r3 * np.rint((Y[:, 1] - sh[1]) / r3)], axis=1) + sh
    da = ((Y - a) ** 2).sum(axis=1)
    db = ((Y - b) ** 2).sum(axis=1)
    P = np.where((db < da)[:, None], b, a)
    u2 = np.rint(2 * P[:, 1] / r3)
    u1 = np.rint(P[:, 0] + u2 / 2)
    return np.stack([u1, u2], axis=1).astype(np.int64)


def coords_of(lat: Lattice, coeffs: np.ndarray) -> np.ndarray:
    return np.asarray(coeffs, dtype=float) @ lat.generator_float


@dataclass(frozen=True)
class SecondMoment:
    value: float | Fraction
    stderr: float
    samples: int
    exact: bool


def second_moment(lat: Lattice, samples: int = 1_000_000, seed: int = 0, chunk: int = 250_000) -> SecondMoment:
    """Normalized second moment G(lattice), dimension-normalized.

    Exact 1/12 for Z^n; otherwise a Monte-Carlo average of the quantization
    error of points drawn uniformly over a fundamental parallelepiped.
    """
    if lat.kind == "Zn":
        return SecondMoment(Fraction(1, 12), 0.0, 0, True)
    rng = np.random.default_rng(seed)
    G = lat.generator_float
    L = lat.dim
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        X = rng.random((n, L)) @ G
        E = X - coords_of(lat, quantize(lat, X))
        e = (E**2).sum(axis=1) / L
        total += e.sum()
        total_sq += (e**2).sum()
        done += n
    mean = total / samples
    var = max(total_sq / samples - mean**2, 0.0)
    norm = lat.volume ** (2.0 / L)
    return SecondMoment(mean / norm, math.sqrt(var / samples) / norm, samples, False)
