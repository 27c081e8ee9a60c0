"""Independent reference solvers used only by the tests."""

import itertools

import numpy as np


def bitmask_assignment(C) -> int:
    """Minimum-cost perfect matching by dynamic programming over column subsets."""
    C = [[int(v) for v in row] for row in np.asarray(C).tolist()]
    n = len(C)
    INF = float("inf")
    dp = [INF] * (1 << n)
    dp[0] = 0
    for mask in range(1 << n):
        cur = dp[mask]
        if cur == INF:
            continue
        i = bin(mask).count("1")
        if i == n:
            continue
        row = C[i]
        for j in range(n):
            if not mask >> j & 1:
                nxt = mask | 1 << j
                v = cur + row[j]
                if v < dp[nxt]:
                    dp[nxt] = v
    return dp[(1 << n) - 1]


def all_optimal_assignments(C) -> list[tuple[int, ...]]:
    C = np.asarray(C)
    n = len(C)
    best, out = None, []
    for perm in itertools.permutations(range(n)):
        v = sum(int(C[i, perm[i]]) for i in range(n))
        if best is None or v < best:
            best, out = v, [perm]
        elif v == best:
            out.append(perm)
    return sorted(out)


def brute_cost_matrix(system, g1, g2, window=2):
    """Exact (points x classes) costs by minimizing the edge cost over a window of
    product-sublattice shifts.  Returns Fractions in an object array."""
    from fractions import Fraction

    from mdlvq import exact
    from mdlvq.labeling import EdgeStructure, edge_cost

    es = EdgeStructure(system)
    lam1, lam2, _ = es.edges
    lat = system.base
    red = np.array(exact.lll(system.product.basis, lat.gram), dtype=np.int64)
    L = lat.dim
    shifts = np.array(list(itertools.product(range(-window, window + 1), repeat=L)), dtype=np.int64) @ red
    n = len(es.points)
    out = np.empty((n, n), dtype=object)
    for i, p in enumerate(es.points.tolist()):
        for c in range(n):
            best = None
            for t in shifts:
                v = edge_cost(lat, p, (lam1[c] + t).tolist(), (lam2[c] + t).tolist(), g1, g2)
                if best is None or v < best:
                    best = v
            out[i, c] = Fraction(best)
    return out


def to_integer_matrix(F):
    """Scale a Fraction matrix to integers; returns (int matrix, scale)."""
    import math
    from fractions import Fraction

    den = 1
    for v in F.ravel():
        den = math.lcm(den, Fraction(v).denominator)
    return np.array([[int(v * den) for v in row] for row in F], dtype=object), Fraction(1, den)
