"""Invariant suites: structural properties of the labeling construction, the
D4 clean-sublattice search and the high-rate deviation trend.

Each suite returns a SuiteReport; failures carry a counterexample.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact
from .analysis import lagrangian_split, mean_deviation_ratio
from .errors import InputError, MDLVQError, NotCleanError
from .labeling import EdgeStructure, solve_labeling
from .lattice import make_lattice
from .quantizer import Quantizer
from .rings import Quaternion, elements_of_norm
from .sublattice import build_system, clean_index_catalog, exhaustive_clean_search_D4, is_clean, similar_sublattice


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    counterexample: object = None

    def line(self) -> str:
        s = f"{'PASS' if self.passed else 'FAIL'}  {self.name}"
        if self.detail:
            s += f"  ({self.detail})"
        if not self.passed and self.counterexample is not None:
            s += f"  counterexample: {self.counterexample}"
        return s


@dataclass
class SuiteReport:
    suite: str
    results: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        out = [r.line() for r in self.results]
        n_ok = sum(r.passed for r in self.results)
        out.append(f"{self.suite}: {n_ok}/{len(self.results)} checks passed")
        return out


# ---------------------------------------------------------------------------
# Structural properties


def _int_gram(lat):
    den = exact.common_denominator(v for row in lat.gram for v in row)
    return np.array([[int(v * den) for v in row] for row in lat.gram], dtype=np.int64), den


def check_system(system, gamma=(1, 1), window: int = 2) -> list[CheckResult]:
    """Counts, coset distinctness, nearest-in-coset, the membership biconditional,
    usage counts, edge-class count and label injectivity for one system."""
    name = f"{system.base.kind}{system.base.dim} xi=({system.xi1}; {system.xi2})"
    es = EdgeStructure(system)
    N1, N2, Ns = system.N1, system.N2, system.N_s
    out = []

    # counts
    got = (len(es.V0), len(es.P1), len(es.P2))
    want = (Ns, Ns // N1, Ns // N2)
    out.append(CheckResult(f"{name}: |V0|, |P1|, |P2|", got == want, f"{got}", None if got == want else want))

    # V0 is a complete set of coset representatives
    ids = system.product.cosets.ids(es.V0)
    ok = np.array_equal(np.sort(ids), np.arange(Ns))
    out.append(CheckResult(f"{name}: V0 hits every coset once", ok))

    # each neighbor list has N_i members in distinct cosets
    bad = None
    nb1 = {}
    for lam1 in es.P1:
        nb = es.neighbors(1, lam1)
        nb1[tuple(lam1)] = nb
        r = es.rank2.ids(nb)
        if len(nb) != N1 or len(set(r.tolist())) != N1:
            bad = tuple(lam1)
            break
    nb2 = {}
    if bad is None:
        for lam2 in es.P2:
            nb = es.neighbors(2, lam2)
            nb2[tuple(lam2)] = nb
            r = es.rank1.ids(nb)
            if len(nb) != N2 or len(set(r.tolist())) != N2:
                bad = tuple(lam2)
                break
    out.append(CheckResult(f"{name}: neighbor lists have N_i distinct cosets", bad is None, counterexample=bad))

    # each neighbor is the strictly nearest member of its coset (brute force over a window)
    G, _ = _int_gram(system.base)
    red = np.array(exact.lll(system.product.basis, system.base.gram), dtype=np.int64)
    shifts = np.array(list(itertools.product(range(-window, window + 1), repeat=system.base.dim)), dtype=np.int64) @ red
    shifts = shifts[np.any(shifts != 0, axis=1)]
    bad = None
    for lam1, nb in nb1.items():
        d = nb - np.array(lam1)
        base_d = np.einsum("ij,jk,ik->i", d, G, d)
        for k in range(len(nb)):
            alt = d[k] + shifts
            alt_d = np.einsum("ij,jk,ik->i", alt, G, alt)
            if np.any(alt_d <= base_d[k]):
                bad = (lam1, tuple(nb[k]))
                break
        if bad:
            break
    out.append(CheckResult(f"{name}: neighbors are nearest in their coset", bad is None, counterexample=bad))

    # lam2 in L1(lam1) <=> lam1 in L2(lam2)
    bad = None
    for lam1, nb in nb1.items():
        for mu in nb:
            back = {tuple(r) for r in es.neighbors(2, mu).tolist()}
            if lam1 not in back:
                bad = (lam1, tuple(mu))
                break
        if bad:
            break
    if bad is None:
        for lam2, nb in nb2.items():
            for mu in nb:
                if lam2 not in {tuple(r) for r in es.neighbors(1, mu).tolist()}:
                    bad = (tuple(mu), lam2)
                    break
            if bad:
                break
    out.append(CheckResult(f"{name}: membership biconditional", bad is None, counterexample=bad))

    # edge classes: N1*N2 of them, the same from either side
    try:
        _, _, eids = es.edges
        ok = len(eids) == N1 * N2 and np.array_equal(es.edges_from_side2(), eids)
        out.append(CheckResult(f"{name}: |E0 / Ls| = N1*N2", ok, f"{len(eids)}"))
    except MDLVQError as e:
        out.append(CheckResult(f"{name}: |E0 / Ls| = N1*N2", False, str(e)))
        return out

    # usage counts over one labeled cell
    lab = solve_labeling(system, *gamma)
    c1 = np.bincount(es.rank1.ids(lab.lam1), minlength=Ns // N1)
    c2 = np.bincount(es.rank2.ids(lab.lam2), minlength=Ns // N2)
    ok = bool(np.all(c1 == N1) and np.all(c2 == N2))
    out.append(CheckResult(f"{name}: usage counts N1, N2", ok, counterexample=None if ok else (c1.tolist(), c2.tolist())))

    # injectivity on the cell and its neighbors, and decode0 inverts encode
    B = np.array(system.product.basis, dtype=np.int64)
    offs = np.array(list(itertools.product((-1, 0, 1), repeat=system.base.dim)), dtype=np.int64) @ B
    P = (lab.points[None, :, :] + offs[:, None, :]).reshape(-1, system.base.dim)
    a1, a2 = lab.label(P)
    pairs = np.concatenate([a1, a2], axis=1)
    uniq = len(np.unique(pairs, axis=0))
    q = Quantizer(lab)
    i1, i2 = q.encode_coeffs(P)
    ok = uniq == len(P) and np.array_equal(q.decode0(i1, i2), P)
    out.append(CheckResult(f"{name}: labels are unique and invertible", ok, f"{len(P)} points"))
    return out


def _clean_elements(base, ring: str, N: int):
    out = []
    for x in elements_of_norm(ring, N):
        if is_clean(base, similar_sublattice(base, x)):
            out.append(x)
    return out


def property_systems(max_ns: int = 225) -> list:
    """Systems with N_s <= max_ns over Z, Z^2, A2, Z^4 and D4 built from clean multipliers."""
    systems = []
    Z1 = make_lattice("Zn", 1)
    for a in range(1, max_ns + 1, 2):
        for b in range(1, max_ns // a + 1, 2):
            if a * b > 1 and a <= 15 and b <= 15:
                systems.append((Z1, a, b))
    for kind, ring, norms in (("Zn", "G", range(1, 46, 2)), ("A2", "J", range(1, 46))):
        base = make_lattice(kind, 2)
        cands = []
        for N in norms:
            cands += _clean_elements(base, ring, N)
        for x1, x2 in itertools.product(cands, repeat=2):
            if 1 < x1.norm() * x2.norm() <= max_ns:
                systems.append((base, x1, x2))
    Z4 = make_lattice("Zn", 4)
    lip = [Quaternion(1, 0, 0, 0), Quaternion(1, 1, 1, 0), Quaternion(2, 1, 0, 0)]
    for x1, x2 in itertools.product(lip, repeat=2):
        n = int(x1.norm() * x2.norm()) ** 2
        if 1 < n <= max_ns and math.gcd(int(x1.norm()), int(x2.norm())) == 1:
            systems.append((Z4, x1, x2))
    D4 = make_lattice("D4", 4)
    hur = [Quaternion.d4_form(1, 1), Quaternion.d4_form(3, 1)]
    for x1, x2 in itertools.product(hur, repeat=2):
        n = int(x1.norm() * x2.norm()) ** 2
        if 1 < n <= max_ns and math.gcd(int(x1.norm()), int(x2.norm())) == 1:
            systems.append((D4, x1, x2))
    return systems


def run_properties(max_ns: int = 225, systems=None) -> SuiteReport:
    t0 = time.perf_counter()
    rep = SuiteReport("properties")
    for base, x1, x2 in systems if systems is not None else property_systems(max_ns):
        try:
            s = build_system(base, x1, x2)
            s.check()
        except NotCleanError:
            continue
        except MDLVQError as e:
            rep.results.append(CheckResult(f"{base.kind}{base.dim} xi=({x1}; {x2}): construction", False, str(e)))
            continue
        if s.N_s > max_ns:
            continue
        try:
            rep.results.extend(check_system(s))
        except NotCleanError:
            continue
    rep.seconds = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# D4 clean search


def run_d4_clean_suite(M: int = 3, expect_clean: bool | None = None) -> SuiteReport:
    """Exhaustive search for clean similar sublattices of D4 with index M^2.

    By default a clean sublattice is expected exactly when M belongs to the
    clean D4 family: 7 or a product of primes congruent to 1 mod 4.
    """
    t0 = time.perf_counter()
    if M < 1:
        raise InputError("M must be positive")
    res = exhaustive_clean_search_D4(M)
    want = (M * M in clean_index_catalog("D4", 4, M)) if expect_clean is None else expect_clean
    verdict = "clean sublattice found" if res.exists_clean else "no clean sublattice"
    detail = f"M={M}, index {M * M}: {res.n_sublattices} similar sublattices, {verdict}"
    rep = SuiteReport("cld2", [CheckResult(f"D4 index {M * M}", res.exists_clean == want, detail, None if res.exists_clean == want else res.tied_points[:1])])
    rep.seconds = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# Deviation trend


@dataclass(frozen=True)
class TrendPoint:
    n: int
    ratio: Fraction
    J_s1: Fraction
    J_s2: Fraction
    J_s2_bound: Fraction
    cell_size: int


def deviation_trend(ns=(1, 3, 5, 7), gamma=(9, 5), xi=(3, 5)) -> list[TrendPoint]:
    """Exact relative deviation on the Z family scaled by n (odd n keep the product clean)."""
    Z1 = make_lattice("Zn", 1)
    out = []
    for n in ns:
        s = build_system(Z1, n * xi[0], n * xi[1])
        lab = solve_labeling(s, *gamma, reduce=s.lcm_sub is not None)
        j1, j2 = lagrangian_split(lab)
        bound = (lab.gamma1 + lab.gamma2) * s.meet.covering_radius_sq / s.base.dim
        out.append(TrendPoint(n, mean_deviation_ratio(lab), j1, j2, bound, lab.size))
    return out


def run_deviation_suite(ns=(1, 3, 5, 7), gamma=(9, 5), threshold: float = 0.1) -> SuiteReport:
    t0 = time.perf_counter()
    pts = deviation_trend(ns, gamma)
    r = [p.ratio for p in pts]
    seq = ", ".join(f"n={p.n}: {float(p.ratio):.4g}" for p in pts)
    rep = SuiteReport("lemma51")
    mono = all(a > b for a, b in zip(r, r[1:]))
    rep.results.append(CheckResult("relative deviation decreases", mono, seq, None if mono else seq))
    rep.results.append(CheckResult(f"final deviation < {threshold}", r[-1] < threshold, f"{float(r[-1]):.4g}"))
    # J_s2 bound / J_s1 should fall like n^-2
    k = [float(p.J_s2_bound / p.J_s1) * p.n**2 for p in pts]
    flat = max(k) / min(k) < 1.05
    rep.results.append(CheckResult("J_s2 bound / J_s1 ~ n^-2", flat, ", ".join(f"{v:.4g}" for v in k)))
    ok = all(p.J_s2 <= p.J_s2_bound for p in pts)
    rep.results.append(CheckResult("J_s2 <= its bound", ok))
    rep.seconds = time.perf_counter() - t0
    return rep


SUITES = {"properties": run_properties, "cld2": run_d4_clean_suite, "lemma51": run_deviation_suite}


def run_suite(name: str, **kw) -> SuiteReport:
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](**kw)
