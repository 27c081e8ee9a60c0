"""Exact integer and rational matrix routines.

Matrices are plain nested tuples/lists of ``int`` or ``Fraction``; rows are
row vectors.  Everything here is exact: no floats.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Matrix = Sequence[Sequence]


def as_int_matrix(M: Matrix) -> tuple[tuple[int, ...], ...]:
    out = []
    for row in M:
        r = []
        for v in row:
            f = Fraction(v)
            if f.denominator != 1:
                raise ValueError(f"non-integer entry {v!r}")
            r.append(int(f))
        out.append(tuple(r))
    return tuple(out)


def as_frac_matrix(M: Matrix) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(v) for v in row) for row in M)


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M: Matrix) -> list[list]:
    return [list(col) for col in zip(*M)]


def matmul(A: Matrix, B: Matrix) -> list[list]:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def vecmat(v: Sequence, M: Matrix) -> list:
    return [sum(v[i] * M[i][j] for i in range(len(v))) for j in range(len(M[0]))]


def quad_form(v: Sequence, A: Matrix, w: Sequence | None = None):
    """v A w^T (w defaults to v)."""
    if w is None:
        w = v
    n = len(v)
    return sum(v[i] * A[i][j] * w[j] for i in range(n) for j in range(n) if v[i] and w[j])


def det(M: Matrix):
    """Determinant by fraction-free (Bareiss) elimination; exact for int/Fraction."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j] = num // prev if isinstance(num, int) and isinstance(prev, int) else Fraction(num) / prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def inverse(M: Matrix) -> list[list[Fraction]]:
    """Exact inverse by Gauss-Jordan over the rationals."""
    n = len(M)
    A = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [v / piv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


def int_inverse(M: Matrix) -> list[list[int]]:
    """Inverse of a unimodular integer matrix."""
    return [list(r) for r in as_int_matrix(inverse(M))]


def common_denominator(values) -> int:
    d = 1
    for v in values:
        q = Fraction(v).denominator
        d = d * q // gcd(d, q)
    return d


# ---------------------------------------------------------------------------
# Hermite / Smith normal forms


def _hnf_inplace(A: list[list[int]], ncols: int) -> int:
    """Row-style HNF on the first ``ncols`` columns; returns the rank.

    Row operations act on whole rows, so extra columns (an appended identity)
    record the unimodular transform.
    """
    nrows = len(A)
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        found = False
        while True:
            nz = [i for i in range(row, nrows) if A[i][col] != 0]
            if not nz:
                break
            found = True
            i0 = min(nz, key=lambda i: abs(A[i][col]))
            A[row], A[i0] = A[i0], A[row]
            clean = True
            p = A[row][col]
            for i in range(row + 1, nrows):
                if A[i][col]:
                    q = A[i][col] // p
                    A[i] = [a - q * b for a, b in zip(A[i], A[row])]
                    if A[i][col]:
                        clean = False
            if clean:
                break
        if not found:
            continue
        if A[row][col] < 0:
            A[row] = [-a for a in A[row]]
        p = A[row][col]
        for i in range(row):
            q = A[i][col] // p
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[row])]
        row += 1
    return row


def hnf(M: Matrix) -> tuple[tuple[int, ...], ...]:
    """Hermite normal form basis (nonzero rows) of the row lattice of ``M``."""
    A = [list(r) for r in as_int_matrix(M)]
    if not A:
        return ()
    rank = _hnf_inplace(A, len(A[0]))
    return tuple(tuple(r) for r in A[:rank])


def left_kernel(M: Matrix) -> list[list[int]]:
    """Integer basis of {k : k M = 0}."""
    A0 = as_int_matrix(M)
    n = len(A0)
    m = len(A0[0])
    A = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(A0)]
    rank = _hnf_inplace(A, m)
    return [r[m:] for r in A[rank:]]


def smith_normal_form(M: Matrix):
    """Smith form of a square integer matrix.

    Returns ``(d, P, Q)`` with ``P @ M @ Q == diag(d)``, ``P`` and ``Q``
    unimodular and ``d[i] | d[i+1]``.
    """
    A = [list(r) for r in as_int_matrix(M)]
    n = len(A)
    m = len(A[0])
    P = identity(n)
    Q = identity(m)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in Q:
            r[i], r[j] = r[j], r[i]

    for t in range(min(n, m)):
        while True:
            cands = [(abs(A[i][j]), i, j) for i in range(t, n) for j in range(t, m) if A[i][j]]
            if not cands:
                break
            _, i, j = min(cands)
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            clean = True
            for i in range(t + 1, n):
                q = A[i][t] // p
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    P[i] = [a - q * b for a, b in zip(P[i], P[t])]
                if A[i][t]:
                    clean = False
            for j in range(t + 1, m):
                q = A[t][j] // p
                if q:
                    for r in A:
                        r[j] -= q * r[t]
                    for r in Q:
                        r[j] -= q * r[t]
                if A[t][j]:
                    clean = False
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, m) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
            P[t] = [a + b for a, b in zip(P[t], P[bad])]
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            P[t] = [-a for a in P[t]]
    d = [A[i][i] for i in range(min(n, m))]
    return d, P, Q


# ---------------------------------------------------------------------------
# Reduction


def gram_schmidt_sq(basis: Matrix, gram: Matrix) -> list[Fraction]:
    """Squared Gram-Schmidt lengths of ``basis`` under the form ``gram``."""
    n = len(basis)
    G = [[Fraction(quad_form(basis[i], gram, basis[j])) for j in range(n)] for i in range(n)]
    mu = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = G[i][j] - sum(mu[j][k] * mu[i][k] * B[k] for k in range(j))
            mu[i][j] = s / B[j]
        B[i] = G[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
    return B


def lll(basis: Matrix, gram: Matrix, delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """LLL-reduce integer coefficient rows under the positive definite ``gram``."""
    b = [list(r) for r in as_int_matrix(basis)]
    n = len(b)

    def ip(x, y):
        return Fraction(quad_form(x, gram, y))

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        B = [Fraction(0)] * n
        star = []
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = ip(b[i], star[j]) / B[j]
                v = [a - mu[i][j] * c for a, c in zip(v, star[j])]
            star.append(v)
            B[i] = ip(v, v)
        return mu, B

    mu, B = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [a - q * c for a, c in zip(b[k], b[j])]
                mu, B = gso()
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, B = gso()
            k = max(k - 1, 1)
    return b
