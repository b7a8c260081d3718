"""Deterministic solvers for small S-convex subproblems.

Every solver returns a :class:`SubproblemSolution`.  Optima are made unique by
one total order on candidate points: objective value first (ties within
``TAU_CMP``), then the point itself lexicographically.  Violator spaces built
on top of these solvers rely on that uniqueness.

Two solver families are provided:

* enumeration over S intersected with the box, for fully discrete domains
  (integers, finite sets, lattices minus sublattices); constraints may be linear
  or convex quadratic;
* enumeration of the integer coordinates plus a two-phase simplex over the
  continuous coordinates (an interval computation when only one coordinate
  is continuous), for mixed domains with linear constraints.

The ``*Oracle`` classes precompute whatever can be shared across many
subproblems over one fixed constraint list; they hold no mutable state after
construction.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domains import (TAU_FEAS, Box, ConvexBody, DomainSpec, LinearConstraint,
                      UnboundedDiscreteError, discrete_points)
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_lp

TAU_CMP = 1e-7

_STATUS_RANK = {UNBOUNDED: 0, OPTIMAL: 1, INFEASIBLE: 2}


@dataclass(frozen=True, eq=False)
class SubproblemSolution:
    status: str
    point: np.ndarray | None = None
    value: float | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "point": None if self.point is None else [float(v) for v in self.point],
            "value": self.value,
        }

    def __repr__(self) -> str:
        if self.status != OPTIMAL:
            return f"SubproblemSolution({self.status})"
        return f"SubproblemSolution(optimal, point={self.point.tolist()}, value={self.value:.6g})"


INFEASIBLE_SOLUTION = SubproblemSolution(INFEASIBLE)
UNBOUNDED_SOLUTION = SubproblemSolution(UNBOUNDED)


def _lex_compare(p: np.ndarray, q: np.ndarray, tol: float = TAU_CMP) -> int:
    diff = p - q
    nz = np.flatnonzero(np.abs(diff) > tol)
    if nz.size == 0:
        return 0
    return -1 if diff[nz[0]] < 0 else 1


def compare_solutions(a: SubproblemSolution, b: SubproblemSolution,
                      tie_break: bool = True) -> int:
    """Three-way comparison under the total order.

    Unbounded sorts below every optimum and infeasible above.  Values closer
    than ``TAU_CMP`` count as tied and fall through to a lexicographic
    comparison of the points (skipped when ``tie_break`` is false).
    """
    ra, rb = _STATUS_RANK[a.status], _STATUS_RANK[b.status]
    if ra != rb:
        return -1 if ra < rb else 1
    if a.status != OPTIMAL:
        return 0
    if abs(a.value - b.value) > TAU_CMP * max(1.0, abs(a.value), abs(b.value)):
        return -1 if a.value < b.value else 1
    return _lex_compare(a.point, b.point) if tie_break else 0


def solutions_equal(a: SubproblemSolution, b: SubproblemSolution, tie_break: bool = True) -> bool:
    return compare_solutions(a, b, tie_break) == 0


solution_sort_key = functools.cmp_to_key(compare_solutions)


def _select_min(points: np.ndarray, values: np.ndarray, feasible: np.ndarray) -> SubproblemSolution:
    idx = np.flatnonzero(feasible)
    if idx.size == 0:
        return INFEASIBLE_SOLUTION
    v = values[idx]
    vmin = v.min()
    cand = idx[v <= vmin + TAU_CMP * max(1.0, abs(vmin))]
    if cand.size > 1:
        cand = cand[np.lexsort(points[cand].T[::-1])]
    best = int(cand[0])
    return SubproblemSolution(OPTIMAL, points[best].astype(float), float(values[best]))


def _require_box(body: ConvexBody, dimension: int) -> Box:
    if body.box is None:
        raise UnboundedDiscreteError("enumeration needs a bounding box on the deterministic set")
    if body.box.dimension != dimension:
        raise ValueError("box dimension does not match the domain")
    return body.box


def solve_enumeration(objective, constraints: Sequence, body: ConvexBody, domain: DomainSpec,
                      capacity: int | None = None) -> SubproblemSolution:
    """Minimize over S intersected with the box by listing every point.

    Returns the total-order minimum among points satisfying ``body`` and all
    ``constraints`` (each within ``TAU_FEAS``), or an infeasible solution.
    """
    if not domain.is_discrete:
        raise ValueError(f"enumeration needs a fully discrete domain, got {domain.kind!r}")
    c = np.asarray(objective, dtype=float)
    pts = discrete_points(domain, _require_box(body, domain.dimension), capacity).astype(float)
    feasible = body.mask(pts)
    for con in constraints:
        feasible &= con.evaluate(pts) <= TAU_FEAS
    return _select_min(pts, pts @ c, feasible)


def simplex_lp(A, b, c, bounds=None) -> SubproblemSolution:
    """Two-phase simplex (Bland's rule); optimal points are lexicographically smallest on the optimal face."""
    res = solve_lp(A, b, c, bounds)
    if res.status != OPTIMAL:
        return SubproblemSolution(res.status)
    return SubproblemSolution(OPTIMAL, res.x, res.value)


def _linear_rows(constraints, dimension: int) -> tuple[np.ndarray, np.ndarray]:
    for con in constraints:
        if not isinstance(con, LinearConstraint):
            raise TypeError("the mixed oracle accepts linear constraints only")
    if not constraints:
        return np.zeros((0, dimension)), np.zeros(0)
    return np.array([con.a for con in constraints]), np.array([con.b for con in constraints])


def _mixed_solve_1d(c: np.ndarray, A: np.ndarray, b: np.ndarray, box: Box,
                    assignments: np.ndarray, m: int) -> SubproblemSolution:
    """One continuous coordinate: every sub-LP is an interval, solved for all assignments at once."""
    z = assignments.astype(float)
    col = A[:, m]
    rhs = b[None, :] - z @ A[:, :m].T
    pos, neg, flat = col > 0.0, col < 0.0, col == 0.0
    upper = np.full(len(z), box.upper[m])
    lower = np.full(len(z), box.lower[m])
    if pos.any():
        upper = np.minimum(upper, (rhs[:, pos] / col[pos]).min(axis=1))
    if neg.any():
        lower = np.maximum(lower, (rhs[:, neg] / col[neg]).max(axis=1))
    ok = lower <= upper + TAU_FEAS * np.maximum(1.0, np.abs(lower))
    if flat.any():
        ok &= np.all(rhs[:, flat] >= -TAU_FEAS, axis=1)
    if not ok.any():
        return INFEASIBLE_SOLUTION
    cm = c[m]
    if cm > 0.0:
        if np.any(ok & ~np.isfinite(lower)):
            return UNBOUNDED_SOLUTION
        x = lower
    elif cm < 0.0:
        if np.any(ok & ~np.isfinite(upper)):
            return UNBOUNDED_SOLUTION
        x = upper
    else:
        x = np.where(np.isfinite(lower), lower, np.where(np.isfinite(upper), upper, 0.0))
    x = np.where(ok, x, 0.0)
    points = np.column_stack([z, x])
    return _select_min(points, points @ c, ok)


def _mixed_solve(c: np.ndarray, A: np.ndarray, b: np.ndarray, box: Box,
                 assignments: np.ndarray, m: int) -> SubproblemSolution:
    if A.shape[1] == m + 1:
        return _mixed_solve_1d(c, A, b, box, assignments, m)
    return _mixed_solve_lp(c, A, b, box, assignments, m)


def _mixed_solve_lp(c: np.ndarray, A: np.ndarray, b: np.ndarray, box: Box,
                    assignments: np.ndarray, m: int) -> SubproblemSolution:
    cz, cc = c[:m], c[m:]
    Az, Ac = A[:, :m], A[:, m:]
    lo, hi = box.lower[m:], box.upper[m:]
    bounds = list(zip(lo, hi))
    # cheapest conceivable continuous contribution, used to skip hopeless assignments
    cont_floor = 0.0
    for cj, l, h in zip(cc, lo, hi):
        if cj > 0:
            cont_floor += cj * l
        elif cj < 0:
            cont_floor += cj * h
    active = np.any(Ac != 0.0, axis=1)
    z_float = assignments.astype(float)
    floors = z_float @ cz + cont_floor
    order = np.argsort(floors, kind="stable") if math.isfinite(cont_floor) else \
        np.arange(len(assignments))

    best = INFEASIBLE_SOLUTION
    for k in order:
        if best.is_optimal and floors[k] > best.value + TAU_CMP * max(1.0, abs(best.value)):
            break
        z = z_float[k]
        rhs = b - Az @ z
        if np.any(rhs[~active] < -TAU_FEAS):
            continue
        if m == A.shape[1]:
            cand = SubproblemSolution(OPTIMAL, z.copy(), float(cz @ z))
        else:
            res = solve_lp(Ac[active], rhs[active], cc, bounds)
            if res.status == UNBOUNDED:
                return UNBOUNDED_SOLUTION
            if res.status != OPTIMAL:
                continue
            point = np.concatenate([z, res.x])
            cand = SubproblemSolution(OPTIMAL, point, float(c @ point))
        if compare_solutions(cand, best) < 0:
            best = cand
    return best


def solve_mixed_linear(objective, constraints: Sequence, body: ConvexBody, domain: DomainSpec,
                       capacity: int | None = None) -> SubproblemSolution:
    """Enumerate the integer coordinates, solve an LP over the continuous ones.

    Unbounded if some sub-LP is unbounded, infeasible if all are infeasible,
    otherwise the total-order minimum across assignments.
    """
    if domain.kind == "finite":
        raise ValueError("finite domains are handled by solve_enumeration")
    d = domain.dimension
    c = np.asarray(objective, dtype=float)
    A, b = _linear_rows(list(body.constraints) + list(constraints), d)
    box = body.box if body.box is not None else Box.unbounded(d)
    assignments = discrete_points(domain, box, capacity)
    return _mixed_solve(c, A, b, box, assignments, domain.num_integer)


def solve_subproblem(objective, constraints: Sequence, body: ConvexBody, domain: DomainSpec,
                     capacity: int | None = None) -> SubproblemSolution:
    """Dispatch to the enumeration or the mixed-linear oracle depending on the domain."""
    if domain.is_discrete:
        return solve_enumeration(objective, constraints, body, domain, capacity)
    return solve_mixed_linear(objective, constraints, body, domain, capacity)


class EnumerationOracle:
    """Enumeration oracle over a fixed constraint list ``constraints``.

    Domain points inside the body are sorted by (value, lexicographic) once and
    every constraint's feasibility mask is precomputed, so a subproblem solve
    is an AND over a few boolean rows.
    """

    def __init__(self, objective, body: ConvexBody, domain: DomainSpec, constraints: Sequence,
                 capacity: int | None = None):
        if not domain.is_discrete:
            raise ValueError("EnumerationOracle needs a fully discrete domain")
        self.objective = np.asarray(objective, dtype=float)
        self.body = body
        self.domain = domain
        self.constraints = tuple(constraints)
        pts = discrete_points(domain, _require_box(body, domain.dimension), capacity).astype(float)
        pts = pts[body.mask(pts)]
        values = pts @ self.objective
        order = np.lexsort(tuple(pts.T[::-1]) + (values,))
        self.points = pts[order]
        self.values = values[order]
        self.masks = self._constraint_masks(self.points)

    def _constraint_masks(self, pts: np.ndarray) -> np.ndarray:
        masks = np.empty((len(self.constraints), len(pts)), dtype=bool)
        linear = [i for i, c in enumerate(self.constraints) if isinstance(c, LinearConstraint)]
        if linear:
            A = np.array([self.constraints[i].a for i in linear])
            b = np.array([self.constraints[i].b for i in linear])
            masks[linear] = (A @ pts.T - b[:, None]) <= TAU_FEAS
        for i, con in enumerate(self.constraints):
            if not isinstance(con, LinearConstraint):
                masks[i] = con.evaluate(pts) <= TAU_FEAS
        return masks

    def solve(self, indices: Sequence[int]) -> SubproblemSolution:
        if len(self.points) == 0:
            return INFEASIBLE_SOLUTION
        indices = list(indices)
        if indices:
            feasible = np.logical_and.reduce(self.masks[indices], axis=0)
            first = int(np.argmax(feasible))
            if not feasible[first]:
                return INFEASIBLE_SOLUTION
        else:
            feasible = None
            first = 0
        v = self.values[first]
        stop = int(np.searchsorted(self.values, v + TAU_CMP * max(1.0, abs(v)), side="right"))
        window = np.arange(first, stop)
        if feasible is not None:
            window = window[feasible[first:stop]]
        if window.size > 1:
            window = window[np.lexsort(self.points[window].T[::-1])]
        best = int(window[0])
        return SubproblemSolution(OPTIMAL, self.points[best].copy(), float(self.values[best]))


class MixedLinearOracle:
    """Mixed-integer linear oracle over a fixed constraint list."""

    def __init__(self, objective, body: ConvexBody, domain: DomainSpec, constraints: Sequence,
                 capacity: int | None = None):
        if domain.kind == "finite":
            raise ValueError("finite domains are handled by EnumerationOracle")
        self.objective = np.asarray(objective, dtype=float)
        self.body = body
        self.domain = domain
        self.constraints = tuple(constraints)
        d = domain.dimension
        self._body_A, self._body_b = _linear_rows(list(body.constraints), d)
        self._A, self._b = _linear_rows(list(self.constraints), d)
        self._box = body.box if body.box is not None else Box.unbounded(d)
        self._assignments = discrete_points(domain, self._box, capacity)

    def solve(self, indices: Sequence[int]) -> SubproblemSolution:
        indices = list(indices)
        A = np.vstack([self._body_A, self._A[indices]])
        b = np.concatenate([self._body_b, self._b[indices]])
        return _mixed_solve(self.objective, A, b, self._box, self._assignments,
                            self.domain.num_integer)


def make_oracle(objective, body: ConvexBody, domain: DomainSpec, constraints: Sequence,
                capacity: int | None = None):
    """Pick the oracle class matching the domain."""
    if domain.is_discrete:
        return EnumerationOracle(objective, body, domain, constraints, capacity)
    return MixedLinearOracle(objective, body, domain, constraints, capacity)
