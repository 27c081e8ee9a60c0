"""High-rate predictions, loss-aware weight selection and the Gaussian MD bound.

Distortions are mean squared error per dimension; rates are bits per
dimension (bits/sample).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from scipy.optimize import brentq

from . import exact
from .errors import InputError

H_GAUSSIAN = 0.5 * math.log2(2 * math.pi * math.e)


def entropy_gaussian() -> float:
    """Differential entropy (bits/dimension) of a unit-variance Gaussian."""
    return H_GAUSSIAN


def entropy_uniform(side: float) -> float:
    return math.log2(side)


@dataclass(frozen=True)
class HighRatePrediction:
    J: float
    d1_pred: float
    d2_pred: float
    ratio_pred: float | None
    d0_pred: float
    J_s1: float
    J_s2_bound: float | None
    gamma1: float
    gamma2: float
    R0: float
    R1: float
    R2: float
    h_p: float
    G_s: float
    G_base: float
    L: int

    def as_dict(self) -> dict:
        return asdict(self)


def predict(g1, g2, R0, R1, R2, h_p, G_s, G_base, L, rho_cap_sq=None, beta=None) -> HighRatePrediction:
    """Dominant-term predictions of the Lagrangian and the side distortions.

    With both weights positive the side excesses split the Lagrangian term
    in the ratio (g2/g1)^2.  With one weight zero the favoured description
    behaves like a single-description quantizer at its own rate.
    ``rho_cap_sq`` (plain squared covering radius of the intersection at unit
    scale) and ``beta`` enable the bound on the neglected term, reported per
    dimension.
    """
    g1, g2 = float(g1), float(g2)
    if g1 < 0 or g2 < 0 or g1 + g2 == 0:
        raise InputError("weights must be nonnegative and not both zero")
    excess_rate = R1 + R2 - R0
    if not excess_rate < min(R1, R2):
        raise InputError("rates must satisfy R1 + R2 - R0 < min(R1, R2)")
    base = G_s * 2 ** (2 * h_p)
    shared = base * 2 ** (-2 * excess_rate)
    s = g1 + g2
    if g1 > 0 and g2 > 0:
        d1 = (g2 / s) ** 2 * shared
        d2 = (g1 / s) ** 2 * shared
        ratio = (g2 / g1) ** 2
    elif g2 == 0:
        d1 = base * 2 ** (-2 * R1)
        d2 = shared
        ratio = None
    else:
        d1 = shared
        d2 = base * 2 ** (-2 * R2)
        ratio = None
    J_s1 = g1 * g2 / s * shared
    J = g1 * d1 + g2 * d2
    d0 = G_base * 2 ** (2 * (h_p - R0))
    Js2 = None
    if rho_cap_sq is not None and beta is not None:
        Js2 = s * float(rho_cap_sq) * beta * beta / L
    return HighRatePrediction(J, d1, d2, ratio, d0, J_s1, Js2, g1, g2, R0, R1, R2, h_p, G_s, G_base, L)


def design_rates(h_p: float, beta: float, L: int, N1: int, N2: int, volume: float = 1.0):
    """R0 = h(p) - log2(nu beta^L)/L and Ri = R0 - log2(Ni)/L."""
    R0 = h_p - math.log2(volume * beta**L) / L
    return R0, R0 - math.log2(N1) / L, R0 - math.log2(N2) / L


def beta_for_rate(h_p: float, R0: float, L: int, volume: float = 1.0) -> float:
    return 2 ** (h_p - R0) / volume ** (1 / L)


# ---------------------------------------------------------------------------
# Channel losses


@dataclass(frozen=True)
class ChannelModel:
    p1: float
    p2: float
    source_power: float = 1.0

    def __post_init__(self):
        for p in (self.p1, self.p2):
            if not 0 <= p <= 1:
                raise InputError("loss probabilities must lie in [0, 1]")


@dataclass(frozen=True)
class GammaChoice:
    ratio: float  # g1 / g2
    gamma: float  # g1 / (g1 + g2)
    second_derivative: float  # of the quadratic surrogate, per unit S
    convex: bool


def surrogate_minimizer(B1: float, B2: float) -> GammaChoice:
    """Minimizer of A + B1 g^2 + B2 (1-g)^2 over g = g1/(g1+g2).

    The second derivative 2 (B1 + B2) is positive, so the stationary point
    g = B2 / (B1 + B2) is the minimum and g1/g2 = B2/B1.
    """
    if not (B1 > 0 and B2 > 0):
        raise InputError("surrogate coefficients must be positive")
    d2 = 2 * (B1 + B2)
    return GammaChoice(B2 / B1, B2 / (B1 + B2), d2, d2 > 0)


def channel_coefficients(ch: ChannelModel) -> tuple[float, float]:
    """(B1, B2) = ((1-p2) p1 S, (1-p1) p2 S): weights of the two side excesses."""
    S = ch.source_power
    return (1 - ch.p2) * ch.p1 * S, (1 - ch.p1) * ch.p2 * S


def optimal_gamma_ratio(ch: ChannelModel) -> GammaChoice:
    """g1/g2 minimizing the expected distortion under the high-rate surrogate.

    Losing description 2 alone (probability (1-p1) p2) exposes side decoder 1,
    whose excess scales like (g2/(g1+g2))^2, hence the ratio (1-p1) p2 / ((1-p2) p1).
    """
    if not (0 < ch.p1 < 1 and 0 < ch.p2 < 1):
        raise InputError("loss probabilities must lie strictly inside (0, 1)")
    B1, B2 = channel_coefficients(ChannelModel(ch.p1, ch.p2, 1.0))
    return surrogate_minimizer(B1, B2)


def quadratic_surrogate(g: float, A: float, B1: float, B2: float) -> float:
    return A + B1 * g * g + B2 * (1 - g) ** 2


def average_distortion(ch: ChannelModel, d0: float, d1: float, d2: float) -> float:
    """(1-p1)(1-p2) d0 + (1-p1) p2 d1 + (1-p2) p1 d2 + p1 p2 E|x|^2."""
    p1, p2 = ch.p1, ch.p2
    return (1 - p1) * (1 - p2) * d0 + (1 - p1) * p2 * d1 + (1 - p2) * p1 * d2 + p1 * p2 * ch.source_power


# ---------------------------------------------------------------------------
# Two-description Gaussian bound


def ozarow_bound(R1: float, R2: float, d1: float, d2: float) -> float:
    """Smallest central distortion compatible with (R1, R2, d1, d2), unit Gaussian.

    With P = 2^{-2(R1+R2)}: P / (1 - (sqrt((1-d1)(1-d2)) - sqrt(d1 d2 - P))^2)
    when d1 + d2 < 1 + P, and P otherwise.
    """
    for R, d in ((R1, d1), (R2, d2)):
        if R < 0:
            raise InputError("rates must be nonnegative")
        if d < 2 ** (-2 * R) * (1 - 1e-12):
            raise InputError(f"side distortion {d} is below the single-description limit {2 ** (-2 * R)}")
    P = 2 ** (-2 * (R1 + R2))
    if d1 + d2 >= 1 + P:
        return P
    d1, d2 = min(d1, 1.0), min(d2, 1.0)
    t = math.sqrt((1 - d1) * (1 - d2)) - math.sqrt(max(d1 * d2 - P, 0.0))
    return P / (1 - t * t)


def ozarow_scale(R1: float, R2: float, d0: float, d1: float, d2: float) -> float:
    """Factor k <= 1 such that (k d1, k d2) lies on the bound's boundary at (R1, R2, d0).

    Side distortions of any real system at these rates and central distortion
    can shrink by at most this factor; -10 log10(k) is the gap in dB.
    """
    kmin = max(2 ** (-2 * R1) / d1, 2 ** (-2 * R2) / d2)

    def f(k):
        return ozarow_bound(R1, R2, k * d1, k * d2) - d0

    if f(1.0) > 0:
        raise InputError("point lies outside the achievable region")
    if f(kmin) <= 0:
        return kmin
    return brentq(f, kmin, 1.0, xtol=1e-14, rtol=1e-12)


def ozarow_gap_db(R1: float, R2: float, d0: float, d1: float, d2: float) -> float:
    return -10 * math.log10(ozarow_scale(R1, R2, d0, d1, d2))


# ---------------------------------------------------------------------------
# Exact labeling statistics


def lagrangian_split(labeling) -> tuple[Fraction, Fraction]:
    """(J_s1, J_s2) sums over the labeling cell, per point and per dimension, unit scale.

    J_s1 uses the edge lengths, J_s2 the distances to the weighted edge mean.
    """
    lat = labeling.system.base
    g1, g2 = labeling.gamma1, labeling.gamma2
    s = g1 + g2
    A = lat.gram
    j1 = Fraction(0)
    j2 = Fraction(0)
    for p, a, b in zip(labeling.points.tolist(), labeling.lam1.tolist(), labeling.lam2.tolist()):
        e = [y - x for x, y in zip(a, b)]
        m = [z - (g1 * x + g2 * y) / s for z, x, y in zip(p, a, b)]
        j1 += Fraction(exact.quad_form(e, A))
        j2 += Fraction(exact.quad_form(m, A))
    k = labeling.size * lat.dim
    return g1 * g2 / s * j1 / k, s * j2 / k


def mean_deviation_ratio(labeling) -> Fraction:
    """|sum |lam - lam1|^2 - sum |lam1 - mean|^2| / sum |lam1 - mean|^2 over the labeling cell.

    The second sum uses the weighted edge mean (g1 lam1 + g2 lam2)/(g1+g2);
    both weights must be positive.
    """
    g1, g2 = labeling.gamma1, labeling.gamma2
    if g1 <= 0 or g2 <= 0:
        raise InputError("both weights must be positive")
    lat = labeling.system.base
    A = lat.gram
    s = g1 + g2
    num = Fraction(0)
    den = Fraction(0)
    for p, a, b in zip(labeling.points.tolist(), labeling.lam1.tolist(), labeling.lam2.tolist()):
        num += exact.quad_form([x - y for x, y in zip(p, a)], A)
        den += exact.quad_form([x - (g1 * x + g2 * y) / s for x, y in zip(a, b)], A)
    if den == 0:
        raise InputError("degenerate labeling: all edges have zero length")
    return abs(num - den) / den


def rate_sweep_rates(h_p: float, R0: float, L: int, N1: int, N2: int, volume: float = 1.0):
    """Design rates at a target central rate; R1 - R2 = log2(N2/N1)/L by construction."""
    beta = beta_for_rate(h_p, R0, L, volume)
    return (beta,) + design_rates(h_p, beta, L, N1, N2, volume)


def db(x: float) -> float:
    return 10 * math.log10(x)


__all__ = [
    "H_GAUSSIAN",
    "ChannelModel",
    "GammaChoice",
    "HighRatePrediction",
    "average_distortion",
    "channel_coefficients",
    "beta_for_rate",
    "db",
    "design_rates",
    "entropy_gaussian",
    "entropy_uniform",
    "lagrangian_split",
    "mean_deviation_ratio",
    "optimal_gamma_ratio",
    "ozarow_bound",
    "ozarow_gap_db",
    "ozarow_scale",
    "predict",
    "quadratic_surrogate",
    "rate_sweep_rates",
    "surrogate_minimizer",
]
