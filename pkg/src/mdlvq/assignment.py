"""Exact min-cost assignment on integer cost matrices.

The solver is the shortest-augmenting-path Hungarian method with dual
potentials.  The final potentials certify optimality, and the equality
subgraph they define contains every optimal assignment, which is what the
tie-breaking and enumeration helpers work on.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import ConstructionError


@dataclass(frozen=True)
class Assignment:
    cols: np.ndarray  # cols[i] = column assigned to row i
    cost: int
    u: np.ndarray  # row potentials
    v: np.ndarray  # column potentials

    def tight(self, C) -> np.ndarray:
        """Boolean mask of the equality subgraph (reduced cost zero)."""
        return (np.asarray(C) - self.u[:, None] - self.v[None, :]) == 0


def _dtype_for(C: np.ndarray):
    if C.dtype == object:
        return object
    span = int(np.abs(C).max(initial=0))
    return np.int64 if span * C.shape[0] * 4 < 2**62 else object


def hungarian(C) -> Assignment:
    """Minimum-cost perfect matching of a square integer matrix."""
    C = np.asarray(C)
    n, m = C.shape
    if n != m:
        raise ConstructionError("assignment needs a square cost matrix")
    dt = _dtype_for(C)
    C = C.astype(dt)
    big = int(np.abs(C).max(initial=0)) * (n + 2) * 4 + 1
    INF = np.array(big, dtype=dt) if dt != object else big
    u = np.zeros(n + 1, dtype=dt)
    v = np.zeros(n + 1, dtype=dt)
    p = np.zeros(n + 1, dtype=np.int64)  # p[j] = row (1-based) matched to column j
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, INF, dtype=dt)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = C[i0 - 1, :] - u[i0] - v[1:]
            mv = minv[1:]
            upd = free & (cur < mv)
            mv[upd] = cur[upd]
            way[1:][upd] = j0
            masked = np.where(free, mv, INF)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            idx = np.nonzero(used)[0]
            u[p[idx]] += delta
            v[idx] -= delta
            mv[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    cols = np.zeros(n, dtype=np.int64)
    for j in range(1, n + 1):
        cols[p[j] - 1] = j - 1
    uu, vv = u[1:].copy(), v[1:].copy()
    if np.any(C - uu[:, None] - vv[None, :] < 0):
        raise ConstructionError("assignment duals are infeasible")
    total = sum(C[i, cols[i]] for i in range(n))
    if total != sum(uu) + sum(vv):
        raise ConstructionError("assignment duality gap is nonzero")
    return Assignment(cols, int(total), uu, vv)


def lexicographic_optimum(C, assignment: Assignment | None = None) -> Assignment:
    """Among all optimal assignments, the one whose column sequence is smallest.

    Rows are fixed in order; each takes the smallest tight column that still
    admits a perfect matching of the remaining rows, found by an alternating
    path in the equality subgraph.
    """
    C = np.asarray(C)
    a = assignment or hungarian(C)
    n = C.shape[0]
    tight = a.tight(C)
    adj = [np.nonzero(tight[i])[0].tolist() for i in range(n)]
    row_col = a.cols.tolist()
    col_row = [0] * n
    for i, j in enumerate(row_col):
        col_row[j] = i
    fixed = [False] * n
    for i in range(n):
        for j in adj[i]:
            if j == row_col[i]:
                break
            r = col_row[j]
            if fixed[r]:
                continue
            path = _alternating_path(r, row_col[i], i, adj, col_row, fixed)
            if path is None:
                continue
            # path: rows r0=r, r1, ... each moving to the next column in sequence
            target = row_col[i]
            for row, col in path:
                row_col[row] = col
                col_row[col] = row
            row_col[i] = j
            col_row[j] = i
            assert col_row[target] != i
            break
        fixed[i] = True
    cols = np.array(row_col, dtype=np.int64)
    total = int(sum(C[i, cols[i]] for i in range(n)))
    if total != a.cost:
        raise ConstructionError("tie-break changed the optimal cost")
    return Assignment(cols, total, a.u, a.v)


def _alternating_path(start_row, target_col, skip_row, adj, col_row, fixed):
    """Moves [(row, new_col), ...] re-seating ``start_row`` so ``target_col`` is used."""
    prev = {start_row: None}
    queue = deque([start_row])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y == target_col:
                moves = [(x, y)]
                while prev[x] is not None:
                    px, pcol = prev[x]
                    moves.append((px, pcol))
                    x = px
                return moves
            r = col_row[y]
            if r == skip_row or fixed[r] or r in prev:
                continue
            prev[r] = (x, y)
            queue.append(r)
    return None


def enumerate_optima(C, limit: int = 16, assignment: Assignment | None = None) -> list[np.ndarray]:
    """Up to ``limit`` distinct optimal assignments, in lexicographic order."""
    C = np.asarray(C)
    a = assignment or hungarian(C)
    n = C.shape[0]
    tight = a.tight(C)
    out: list[np.ndarray] = []

    def feasible(rows_left, cols_left):
        if not rows_left:
            return True
        sub = tight[np.ix_(rows_left, cols_left)]
        m = maximum_bipartite_matching(csr_matrix(sub.astype(np.int8)), perm_type="column")
        return bool(np.all(m >= 0))

    def dfs(i, chosen, used):
        if len(out) >= limit:
            return
        if i == n:
            out.append(np.array(chosen, dtype=np.int64))
            return
        for j in np.nonzero(tight[i])[0]:
            if used[j]:
                continue
            used[j] = True
            rows_left = list(range(i + 1, n))
            cols_left = [c for c in range(n) if not used[c]]
            if feasible(rows_left, cols_left):
                chosen.append(int(j))
                dfs(i + 1, chosen, used)
                chosen.pop()
            used[j] = False
            if len(out) >= limit:
                return

    dfs(0, [], np.zeros(n, dtype=bool))
    return out
