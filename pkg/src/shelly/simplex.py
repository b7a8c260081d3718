"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Solves ``min c.x  s.t.  A x <= b,  lo <= x <= hi`` where bounds may be infinite.
Variables are shifted/reflected/split to the nonnegative orthant, slacks are
added, and rows with a negative right-hand side receive an artificial variable
for phase one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9
MAX_PIVOTS = 50_000

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: np.ndarray | None = None
    value: float | None = None
    unique: bool = False


class _Tableau:
    """Rows 0..m-1 are constraints, last row holds reduced costs, last column the rhs."""

    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T
        self.basis = basis

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        T[r] /= T[r, c]
        col = T[:, c].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = c

    def run(self, allowed: np.ndarray) -> str:
        """Bland's rule iterations on the current objective row."""
        T = self.T
        m = T.shape[0] - 1
        for _ in range(MAX_PIVOTS):
            reduced = T[-1, :-1]
            candidates = np.flatnonzero((reduced < -PIVOT_TOL) & allowed)
            if candidates.size == 0:
                return OPTIMAL
            c = int(candidates[0])
            column = T[:m, c]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                return UNBOUNDED
            ratios = T[rows, -1] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            self.pivot(r, c)
        raise RuntimeError("simplex exceeded the pivot limit")


def _standardize(A, b, c, lo, hi):
    """Map x to y >= 0 with x = M y + shift; finite double bounds become rows."""
    n = A.shape[1]
    cols, shift = [], np.zeros(n)
    extra_rows = []
    for j in range(n):
        if math.isfinite(lo[j]):
            shift[j] = lo[j]
            cols.append((j, 1.0))
            if math.isfinite(hi[j]):
                extra_rows.append((len(cols) - 1, hi[j] - lo[j]))
        elif math.isfinite(hi[j]):
            shift[j] = hi[j]
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    k = len(cols)
    M = np.zeros((n, k))
    for t, (j, s) in enumerate(cols):
        M[j, t] = s
    A2 = A @ M
    b2 = b - A @ shift
    if extra_rows:
        U = np.zeros((len(extra_rows), k))
        for i, (t, _) in enumerate(extra_rows):
            U[i, t] = 1.0
        A2 = np.vstack([A2, U])
        b2 = np.concatenate([b2, [r for _, r in extra_rows]])
    c2 = c @ M
    return A2, b2, c2, M, shift


def _solve_standard(A, b, c):
    """min c.y  s.t.  A y <= b, y >= 0.  Returns (status, y, unique)."""
    m, n = A.shape
    neg = b < 0
    n_art = int(neg.sum())
    width = n + m + n_art
    T = np.zeros((m + 1, width + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[:m][neg] *= -1.0
    basis = []
    art = n + m
    for i in range(m):
        if neg[i]:
            T[i, art] = 1.0
            basis.append(art)
            art += 1
        else:
            basis.append(n + i)
    tab = _Tableau(T, basis)

    if n_art:
        T[-1, :] = 0.0
        for i in range(m):
            if neg[i]:
                T[-1] -= T[i]
        T[-1, n + m:width] = 0.0
        tab.run(np.ones(width, dtype=bool))
        if -T[-1, -1] > 1e-7 * max(1.0, np.abs(b).max(initial=0.0)):
            return INFEASIBLE, None, False
        # drive zero-level artificials out of the basis
        drop = []
        for i in range(m):
            if tab.basis[i] >= n + m:
                nz = np.flatnonzero(np.abs(T[i, :n + m]) > PIVOT_TOL)
                if nz.size:
                    tab.pivot(i, int(nz[0]))
                else:
                    drop.append(i)
        if drop:
            keep = [i for i in range(m) if i not in drop] + [m]
            T = T[keep]
            tab = _Tableau(T, [tab.basis[i] for i in keep[:-1]])
        T = np.hstack([T[:, :n + m], T[:, -1:]])
        tab.T = T

    T = tab.T
    full_c = np.concatenate([c, np.zeros(m)])
    T[-1, :-1] = full_c
    T[-1, -1] = 0.0
    for i, j in enumerate(tab.basis):
        if full_c[j] != 0.0:
            T[-1] -= full_c[j] * T[i]
    status = tab.run(np.ones(n + m, dtype=bool))
    if status == UNBOUNDED:
        return UNBOUNDED, None, False
    y = np.zeros(n + m)
    for i, j in enumerate(tab.basis):
        y[j] = T[i, -1]
    nonbasic = np.ones(n + m, dtype=bool)
    nonbasic[tab.basis] = False
    unique = bool(np.all(T[-1, :-1][nonbasic] > PIVOT_TOL))
    return OPTIMAL, y[:n], unique


def _solve_once(A, b, c, lo, hi) -> LPResult:
    A2, b2, c2, M, shift = _standardize(A, b, c, lo, hi)
    if A2.shape[0] == 0:
        # no rows: every y >= 0 is feasible
        if np.any(c2 < -PIVOT_TOL):
            return LPResult(UNBOUNDED)
        x = shift.copy()
        return LPResult(OPTIMAL, x, float(c @ x), bool(np.all(c2 > PIVOT_TOL)))
    status, y, unique = _solve_standard(A2, b2, c2)
    if status != OPTIMAL:
        return LPResult(status)
    x = M @ y + shift
    return LPResult(OPTIMAL, x, float(c @ x), unique)


def solve_lp(A, b, c, bounds=None, lexicographic: bool = True) -> LPResult:
    """Minimize ``c.x`` subject to ``A x <= b`` and variable bounds.

    Parameters
    ----------
    A, b : array_like
        Inequality data, shape (m, n) and (m,).  ``m`` may be zero.
    c : array_like
        Objective, shape (n,).
    bounds : sequence of (lo, hi), optional
        ``None`` or +-inf entries mean unbounded.  Default: all variables free.
    lexicographic : bool
        When the optimum is not unique, return the lexicographically smallest
        point of the optimal face, found by re-solving with the objective value
        fixed and minimizing each coordinate in turn.

    Returns
    -------
    LPResult
        ``status`` is one of ``"optimal"``, ``"infeasible"``, ``"unbounded"``.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    A = np.asarray(A, dtype=float).reshape(-1, n)
    b = np.asarray(b, dtype=float).reshape(-1)
    if A.shape[0] != b.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
    if bounds is None:
        lo, hi = np.full(n, -math.inf), np.full(n, math.inf)
    else:
        bounds = list(bounds)
        if len(bounds) != n:
            raise ValueError(f"{len(bounds)} bounds given for {n} variables")
        lo = np.array([-math.inf if p[0] is None else p[0] for p in bounds], dtype=float)
        hi = np.array([math.inf if p[1] is None else p[1] for p in bounds], dtype=float)
    if np.any(lo > hi):
        return LPResult(INFEASIBLE)

    res = _solve_once(A, b, c, lo, hi)
    if res.status != OPTIMAL or res.unique or not lexicographic or n == 0:
        return res

    # lexicographic minimum of the optimal face
    value = res.value
    rows = [A, c[None, :]]
    rhs = [b, [value + 1e-12 * max(1.0, abs(value))]]
    x = res.x.copy()
    lo_fix, hi_fix = lo.copy(), hi.copy()
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        sub = _solve_once(np.vstack(rows), np.concatenate(rhs), e, lo_fix, hi_fix)
        if sub.status != OPTIMAL:
            # face unbounded in -x_i (or numerically lost): keep what we have
            break
        x = sub.x
        lo_fix[i] = hi_fix[i] = x[i]
    return LPResult(OPTIMAL, x, float(c @ x), True)
