"""Runtime two-description quantizer: encode, decode and Monte-Carlo measurement."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import analysis, exact
from .errors import CorruptionError, InputError
from .labeling import Labeling, lcm_reduce
from .lattice import coords_of, quantize, second_moment
from .sublattice import CosetMap

SOURCES = ("gaussian", "uniform")


@dataclass(frozen=True)
class QuantizerConfig:
    labeling: Labeling
    beta: float
    source: str = "gaussian"
    box: float = 1.0  # side of the cube for the uniform source
    seed: int = 0
    samples: int = 100_000
    chunk: int = 250_000

    def __post_init__(self):
        if not self.beta > 0:
            raise InputError("beta must be positive")
        if self.samples < 1:
            raise InputError("samples must be >= 1")
        if self.source not in SOURCES:
            raise InputError(f"source must be one of {SOURCES}")
        if self.source == "uniform" and not self.box > 0:
            raise InputError("uniform source needs a positive box side")

    @property
    def h_p(self) -> float:
        if self.source == "gaussian":
            return analysis.entropy_gaussian()
        return analysis.entropy_uniform(self.box)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        L = self.labeling.system.base.dim
        if self.source == "gaussian":
            return rng.standard_normal((n, L))
        return (rng.random((n, L)) - 0.5) * self.box


class Quantizer:
    """Two-description lattice quantizer built from a labeling.

    Description i of a source vector is the integer coordinate vector of
    a_i(lam) in the Hermite basis of Lambda_i.
    """

    def __init__(self, labeling: Labeling, beta: float = 1.0):
        sys = labeling.system
        if labeling.domain.basis != sys.product.basis:
            labeling = lcm_reduce(sys, labeling)
        self.labeling = labeling
        self.system = sys
        self.base = sys.base
        self.beta = float(beta)
        self._B1 = np.array(sys.sub1.basis, dtype=np.int64)
        self._B2 = np.array(sys.sub2.basis, dtype=np.int64)
        self._r1 = CosetMap(sys.sub1.basis, sys.product.basis)
        self._r2 = CosetMap(sys.sub2.basis, sys.product.basis)
        self._sdom = CosetMap(exact.identity(self.base.dim), sys.product.basis)
        row = np.full(sys.N_s, -1, dtype=np.int64)
        row[labeling.coset_ids] = np.arange(labeling.size)
        self._row_of_class = row

    # index <-> sublattice point
    @staticmethod
    def _to_index(P: np.ndarray, cm: CosetMap) -> np.ndarray:
        # cm.fine is the sublattice basis, so fadj/fdet is its inverse
        num = P @ cm.fadj
        if np.any(num % cm.fdet):
            raise InputError("point is not in the sublattice")
        return num // cm.fdet

    def encode_coeffs(self, lam: np.ndarray):
        a1, a2 = self.labeling.label(lam)
        return self._to_index(a1, self._r1), self._to_index(a2, self._r2)

    def encode(self, X) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(lam coefficients, idx1, idx2) for each row of X."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.base.dim:
            raise InputError(f"expected vectors of length {self.base.dim}")
        lam = quantize(self.base, X / self.beta)
        i1, i2 = self.encode_coeffs(lam)
        return lam, i1, i2

    def decode1(self, idx1) -> np.ndarray:
        """Base coefficients of a1(lam)."""
        return np.atleast_2d(np.asarray(idx1, dtype=np.int64)) @ self._B1

    def decode2(self, idx2) -> np.ndarray:
        return np.atleast_2d(np.asarray(idx2, dtype=np.int64)) @ self._B2

    def decode0(self, idx1, idx2) -> np.ndarray:
        """Invert the labeling; raises CorruptionError for pairs that are not labels."""
        a1 = self.decode1(idx1)
        a2 = self.decode2(idx2)
        cls = self._r1.ids(a1) * self.system.N1 + self._r2.ids(a2)
        rows = self._row_of_class[cls]
        t = a1 - self.labeling.lam1[rows]
        ok = (rows >= 0) & np.all(a2 - self.labeling.lam2[rows] == t, axis=1) & (self._sdom.ids(t) == 0)
        if not np.all(ok):
            bad = int(np.nonzero(~ok)[0][0])
            raise CorruptionError(f"index pair {bad} is not in the image of the labeling")
        return self.labeling.points[rows] + t

    def coords(self, coeffs) -> np.ndarray:
        return coords_of(self.base, coeffs) * self.beta


# ---------------------------------------------------------------------------
# Measurement


@dataclass(frozen=True)
class EntropyEstimate:
    plugin: float  # bits per dimension
    miller_madow: float
    stderr: float
    symbols: int


def _entropy(counts: np.ndarray, n: int, L: int) -> EntropyEstimate:
    p = counts / n
    logp = np.log2(p)
    H = float(-(p * logp).sum())
    H2 = float((p * logp * logp).sum())
    var = max(H2 - H * H, 0.0) / n
    mm = H + (len(counts) - 1) / (2 * n * math.log(2))
    return EntropyEstimate(H / L, mm / L, math.sqrt(var) / L, int(len(counts)))


class _Counter:
    """Exact symbol counts for integer rows, merged chunk by chunk."""

    def __init__(self):
        self.rows = None
        self.counts = None

    def add(self, R: np.ndarray):
        u, c = np.unique(R, axis=0, return_counts=True)
        if self.rows is None:
            self.rows, self.counts = u, c
            return
        allr = np.concatenate([self.rows, u])
        allc = np.concatenate([self.counts, c])
        u2, inv = np.unique(allr, axis=0, return_inverse=True)
        c2 = np.zeros(len(u2), dtype=np.int64)
        np.add.at(c2, inv.ravel(), allc)
        self.rows, self.counts = u2, c2


@dataclass(frozen=True)
class RateDistortionReport:
    n_samples: int
    seed: int
    source: str
    beta: float
    L: int
    N1: int
    N2: int
    R0: float
    R1: float
    R2: float
    R0_mm: float
    R1_mm: float
    R2_mm: float
    R0_stderr: float
    R1_stderr: float
    R2_stderr: float
    symbols: tuple
    R0_analytic: float
    R1_analytic: float
    R2_analytic: float
    d0: float
    d1: float
    d2: float
    d0_stderr: float
    d1_stderr: float
    d2_stderr: float
    d1_closed: float
    d2_closed: float
    excess1: float
    excess2: float
    entropy_warning: bool
    predicted: dict | None = field(default=None)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["symbols"] = list(self.symbols)
        return d


def measure(cfg: QuantizerConfig, predict: bool = True) -> RateDistortionReport:
    """Monte-Carlo rates and distortions of the quantizer over the configured source."""
    q = Quantizer(cfg.labeling, cfg.beta)
    sys = q.system
    L = sys.base.dim
    rng = np.random.default_rng(cfg.seed)
    sums = np.zeros(3)
    sq = np.zeros(3)
    counters = [_Counter(), _Counter(), _Counter()]
    done = 0
    while done < cfg.samples:
        n = min(cfg.chunk, cfg.samples - done)
        X = cfg.sample(rng, n)
        lam, i1, i2 = q.encode(X)
        recon = (q.coords(lam), q.coords(q.decode1(i1)), q.coords(q.decode2(i2)))
        for k, Y in enumerate(recon):
            e = ((X - Y) ** 2).sum(axis=1) / L
            sums[k] += e.sum()
            sq[k] += (e * e).sum()
        for c, R in zip(counters, (lam, i1, i2)):
            c.add(R)
        done += n
    N = cfg.samples
    mean = sums / N
    var = np.maximum(sq / N - mean**2, 0.0)
    se = np.sqrt(var / max(N - 1, 1))
    ents = [_entropy(c.counts, N, L) for c in counters]
    vol = float(sys.base.volume)
    R0a, R1a, R2a = analysis.design_rates(cfg.h_p, cfg.beta, L, sys.N1, sys.N2, vol)
    ex1, ex2 = (float(v) for v in cfg.labeling.side_excess())
    b2 = cfg.beta**2
    warn = any(e.symbols > N / 10 for e in ents)
    pred = None
    if predict and cfg.labeling.gamma1 + cfg.labeling.gamma2 > 0:
        G = base_second_moment(sys.base)
        try:
            pred = analysis.predict(
                float(cfg.labeling.gamma1),
                float(cfg.labeling.gamma2),
                R0a,
                R1a,
                R2a,
                cfg.h_p,
                G,
                G,
                L,
                sys.meet.covering_radius_sq,
                cfg.beta,
            ).as_dict()
        except InputError:
            pred = None
    return RateDistortionReport(
        n_samples=N,
        seed=cfg.seed,
        source=cfg.source,
        beta=cfg.beta,
        L=L,
        N1=sys.N1,
        N2=sys.N2,
        R0=ents[0].plugin,
        R1=ents[1].plugin,
        R2=ents[2].plugin,
        R0_mm=ents[0].miller_madow,
        R1_mm=ents[1].miller_madow,
        R2_mm=ents[2].miller_madow,
        R0_stderr=ents[0].stderr,
        R1_stderr=ents[1].stderr,
        R2_stderr=ents[2].stderr,
        symbols=tuple(e.symbols for e in ents),
        R0_analytic=R0a,
        R1_analytic=R1a,
        R2_analytic=R2a,
        d0=float(mean[0]),
        d1=float(mean[1]),
        d2=float(mean[2]),
        d0_stderr=float(se[0]),
        d1_stderr=float(se[1]),
        d2_stderr=float(se[2]),
        d1_closed=float(mean[0] + ex1 * b2),
        d2_closed=float(mean[0] + ex2 * b2),
        excess1=ex1,
        excess2=ex2,
        entropy_warning=warn,
        predicted=pred,
    )


_G_CLOSED = {"A2": 5 / (36 * math.sqrt(3)), "D4": 13 / (120 * math.sqrt(2))}


def base_second_moment(lat) -> float:
    """Normalized second moment of the base lattice (closed form for the supported kinds)."""
    if lat.kind == "Zn":
        return 1 / 12
    if lat.kind in _G_CLOSED:
        return _G_CLOSED[lat.kind]
    return float(second_moment(lat, samples=400_000, seed=12345).value)
