"""Variable domains S, their Helly numbers, and the convex bodies that live on them.

A domain is described by :class:`DomainSpec`.  Five kinds are supported:

* ``reals``        -- S = R^d
* ``integers``     -- S = Z^d
* ``mixed``        -- S = Z^m x R^k, integer coordinates first
* ``finite``       -- an explicit finite point set
* ``lattice_minus`` -- Z^m minus a finite union of translated sublattices
  ``{x : a.x = r (mod q)}``, optionally followed by k continuous coordinates

Everything here is immutable and safe to share between threads.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

TAU_INT = 1e-6
TAU_FEAS = 1e-9
DEFAULT_CAPACITY = 10**7
CAPACITY_ENV = "S_SCENARIO_CAPACITY"

KINDS = ("reals", "integers", "mixed", "finite", "lattice_minus")


class CapacityError(RuntimeError):
    """Raised when an enumeration would produce more points than allowed."""


class UnboundedDiscreteError(ValueError):
    """Raised when a discrete coordinate has no finite box bounds."""


def default_capacity() -> int:
    value = os.environ.get(CAPACITY_ENV)
    return int(value) if value else DEFAULT_CAPACITY


def _frozen_array(values, dtype=float, ndim=1) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# constraint records


@dataclass(frozen=True, eq=False)
class LinearConstraint:
    """``a . x <= b``."""

    a: np.ndarray
    b: float
    label: object = None

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen_array(self.a))
        object.__setattr__(self, "b", float(self.b))

    @property
    def dimension(self) -> int:
        return self.a.shape[0]

    def evaluate(self, x) -> np.ndarray | float:
        """Constraint value ``a.x - b``; accepts one point or an (n, d) array."""
        return np.asarray(x, dtype=float) @ self.a - self.b

    def lifted(self, positions: Sequence[int], dimension: int) -> LinearConstraint:
        a = np.zeros(dimension)
        a[list(positions)] = self.a
        return LinearConstraint(a, self.b, self.label)


@dataclass(frozen=True, eq=False)
class QuadraticConstraint:
    """``x^T Q x + q . x + c0 <= 0`` with Q symmetric positive semidefinite."""

    Q: np.ndarray
    q: np.ndarray
    c0: float
    label: object = None

    def __post_init__(self):
        Q = _frozen_array(self.Q, ndim=2)
        q = _frozen_array(self.q)
        if Q.shape != (q.shape[0], q.shape[0]):
            raise ValueError("Q must be d x d with d = len(q)")
        if not np.allclose(Q, Q.T, atol=1e-9, rtol=0.0):
            raise ValueError("Q must be symmetric")
        if q.shape[0] and np.linalg.eigvalsh(Q).min() < -1e-9:
            raise ValueError("Q must be positive semidefinite")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c0", float(self.c0))

    @property
    def dimension(self) -> int:
        return self.q.shape[0]

    def evaluate(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(x @ self.Q @ x + self.q @ x + self.c0)
        return np.einsum("ij,jk,ik->i", x, self.Q, x) + x @ self.q + self.c0

    def lifted(self, positions: Sequence[int], dimension: int) -> QuadraticConstraint:
        pos = list(positions)
        Q = np.zeros((dimension, dimension))
        Q[np.ix_(pos, pos)] = self.Q
        q = np.zeros(dimension)
        q[pos] = self.q
        return QuadraticConstraint(Q, q, self.c0, self.label)


Constraint = LinearConstraint | QuadraticConstraint


@dataclass(frozen=True, eq=False)
class Box:
    """Per-coordinate bounds; infinite entries mean unbounded."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = _frozen_array(self.lower)
        hi = _frozen_array(self.upper)
        if lo.shape != hi.shape:
            raise ValueError("lower and upper bounds differ in length")
        if np.any(lo > hi):
            raise ValueError("box has lower > upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def uniform(cls, dimension: int, lo: float, hi: float) -> Box:
        return cls(np.full(dimension, float(lo)), np.full(dimension, float(hi)))

    @classmethod
    def unbounded(cls, dimension: int) -> Box:
        return cls.uniform(dimension, -math.inf, math.inf)

    @classmethod
    def from_pairs(cls, pairs) -> Box:
        pairs = list(pairs)
        lo = [-math.inf if p[0] is None else p[0] for p in pairs]
        hi = [math.inf if p[1] is None else p[1] for p in pairs]
        return cls(lo, hi)

    @property
    def dimension(self) -> int:
        return self.lower.shape[0]

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.lower.tolist(), self.upper.tolist()))

    def contains(self, x, tol: float = TAU_FEAS) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def intersect(self, other: Box) -> Box:
        return Box(np.maximum(self.lower, other.lower), np.minimum(self.upper, other.upper))


def as_box(box, dimension: int | None = None) -> Box:
    if isinstance(box, Box):
        out = box
    else:
        out = Box.from_pairs(box)
    if dimension is not None and out.dimension != dimension:
        raise ValueError(f"box has dimension {out.dimension}, expected {dimension}")
    return out


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """A convex set given by linear / convex-quadratic constraints and an optional box."""

    constraints: tuple[Constraint, ...] = ()
    box: Box | None = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        dims = {c.dimension for c in self.constraints}
        if self.box is not None:
            dims.add(self.box.dimension)
        if len(dims) > 1:
            raise ValueError(f"inconsistent constraint dimensions {sorted(dims)}")

    def contains(self, x, tol: float = TAU_FEAS) -> bool:
        if self.box is not None and not self.box.contains(x, tol):
            return False
        return all(c.evaluate(x) <= tol for c in self.constraints)

    def mask(self, points: np.ndarray, tol: float = TAU_FEAS) -> np.ndarray:
        """Membership of every row of ``points``."""
        points = np.asarray(points, dtype=float)
        keep = np.ones(points.shape[0], dtype=bool)
        if self.box is not None:
            keep &= np.all(points >= self.box.lower - tol, axis=1)
            keep &= np.all(points <= self.box.upper + tol, axis=1)
        for c in self.constraints:
            keep &= c.evaluate(points) <= tol
        return keep

    @property
    def is_linear(self) -> bool:
        return all(isinstance(c, LinearConstraint) for c in self.constraints)


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Congruence:
    """Excludes ``{x in Z^m : a . x = r (mod q)}``."""

    a: tuple[int, ...]
    q: int
    r: int

    def __post_init__(self):
        a = tuple(int(v) for v in self.a)
        if any(v != w for v, w in zip(a, self.a)):
            raise ValueError("congruence coefficients must be integers")
        if int(self.q) < 2:
            raise ValueError("congruence modulus must be >= 2")
        if not 0 <= int(self.r) < int(self.q):
            raise ValueError("residue must satisfy 0 <= r < q")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "r", int(self.r))

    def excludes(self, z: np.ndarray) -> np.ndarray | bool:
        """True where the integer point(s) ``z`` fall in the excluded coset."""
        z = np.asarray(z, dtype=np.int64)
        return (z @ np.asarray(self.a, dtype=np.int64) - self.r) % self.q == 0


@dataclass(frozen=True)
class DomainSpec:
    """Description of S.

    Use the classmethod constructors rather than filling fields by hand.
    ``num_integer`` counts the leading integral coordinates; the remaining
    ``dimension - num_integer`` coordinates are continuous.
    """

    kind: str
    dimension: int
    num_integer: int = 0
    points: tuple[tuple[float, ...], ...] = ()
    exclusions: tuple[Congruence, ...] = ()
    helly_override: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not 0 <= self.num_integer <= self.dimension:
            raise ValueError("num_integer must lie in [0, dimension]")
        if self.helly_override is not None and self.helly_override < 1:
            raise ValueError("helly_override must be a positive integer")
        if self.kind == "finite":
            if not self.points:
                raise ValueError("a finite domain needs at least one point")
            if any(len(p) != self.dimension for p in self.points):
                raise ValueError("finite-set points must all have length d")
            if len(set(self.points)) != len(self.points):
                raise ValueError("finite-set points must be pairwise distinct")
        for ex in self.exclusions:
            if len(ex.a) != self.num_integer:
                raise ValueError("exclusion vectors must cover the integer coordinates")

    # constructors -----------------------------------------------------------
    @classmethod
    def reals(cls, d: int, helly_override: int | None = None) -> DomainSpec:
        return cls("reals", d, 0, helly_override=helly_override)

    @classmethod
    def integers(cls, d: int, helly_override: int | None = None) -> DomainSpec:
        return cls("integers", d, d, helly_override=helly_override)

    @classmethod
    def mixed(cls, num_integer: int, num_continuous: int,
              helly_override: int | None = None) -> DomainSpec:
        return cls("mixed", num_integer + num_continuous, num_integer,
                   helly_override=helly_override)

    @classmethod
    def finite(cls, points, helly_override: int | None = None) -> DomainSpec:
        pts = tuple(tuple(float(v) for v in p) for p in points)
        d = len(pts[0]) if pts else 0
        return cls("finite", d, 0, points=pts, helly_override=helly_override)

    @classmethod
    def lattice_minus(cls, d: int, exclusions, num_continuous: int = 0,
                      helly_override: int | None = None) -> DomainSpec:
        exs = tuple(e if isinstance(e, Congruence) else Congruence(*e) for e in exclusions)
        return cls("lattice_minus", d + num_continuous, d, exclusions=exs,
                   helly_override=helly_override)

    # derived ------------------------------------------------------------------
    @property
    def num_continuous(self) -> int:
        if self.kind == "finite":
            return 0
        return self.dimension - self.num_integer

    @property
    def is_discrete(self) -> bool:
        """Every coordinate is discrete, so S intersected with a box is finite."""
        return self.kind == "finite" or (self.kind != "reals" and self.num_continuous == 0)

    @property
    def helly_is_upper_bound(self) -> bool:
        """For finite sets we only report the trivial bound h(S) <= |S|."""
        return self.kind == "finite" and self.helly_override is None


def helly_number(spec: DomainSpec) -> int | None:
    """S-Helly number of the domain, or ``None`` when no closed form is known.

    ``helly_override`` always wins.  For a finite set the value returned is the
    trivial upper bound ``|S|`` (see :attr:`DomainSpec.helly_is_upper_bound`).
    """
    if spec.helly_override is not None:
        return spec.helly_override
    if spec.kind == "reals":
        return spec.dimension + 1
    if spec.kind == "integers":
        return 2**spec.dimension
    if spec.kind == "mixed":
        return 2**spec.num_integer * (spec.num_continuous + 1)
    if spec.kind == "finite":
        return len(spec.points)
    return None


def contains(spec: DomainSpec, x) -> bool:
    """Membership of a single point in S (integrality up to ``TAU_INT``)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.dimension,):
        raise ValueError(f"point has shape {x.shape}, domain dimension is {spec.dimension}")
    if spec.kind == "reals":
        return True
    if spec.kind == "finite":
        pts = np.asarray(spec.points)
        return bool(np.any(np.all(np.abs(pts - x) <= TAU_INT, axis=1)))
    z = x[: spec.num_integer]
    zr = np.round(z)
    if np.any(np.abs(z - zr) > TAU_INT):
        return False
    return not any(bool(ex.excludes(zr)) for ex in spec.exclusions)


def _integer_ranges(spec: DomainSpec, box: Box) -> list[range]:
    ranges = []
    for i in range(spec.num_integer):
        lo, hi = box.lower[i], box.upper[i]
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise UnboundedDiscreteError(f"integer coordinate {i} is not bounded by the box")
        ranges.append(range(math.ceil(lo - TAU_INT), math.floor(hi + TAU_INT) + 1))
    return ranges


def count_in_box(spec: DomainSpec, box) -> int:
    """Upper bound on the number of discrete assignments in the box (exact unless exclusions)."""
    box = as_box(box, spec.dimension)
    if spec.kind == "finite":
        return len(spec.points)
    return math.prod(len(r) for r in _integer_ranges(spec, box))


def discrete_points(spec: DomainSpec, box, capacity: int | None = None) -> np.ndarray:
    """All discrete assignments of S inside ``box`` as an array, rows in lexicographic order.

    For mixed-type domains the rows hold only the integer coordinates (shape
    ``(n, num_integer)``); a purely continuous domain yields a single empty row.
    Finite sets yield their member points that lie inside the box.
    """
    box = as_box(box, spec.dimension)
    capacity = default_capacity() if capacity is None else capacity
    if spec.kind == "finite":
        pts = np.asarray(spec.points, dtype=float)
        pts = pts[np.all((pts >= box.lower - TAU_FEAS) & (pts <= box.upper + TAU_FEAS), axis=1)]
        order = np.lexsort(pts.T[::-1]) if len(pts) else np.arange(0)
        return pts[order]
    ranges = _integer_ranges(spec, box)
    total = math.prod(len(r) for r in ranges)
    if total > capacity:
        raise CapacityError(f"{total} lattice points in the box exceed the capacity {capacity}")
    if not ranges:
        return np.zeros((1, 0), dtype=np.int64)
    if total == 0:
        return np.zeros((0, len(ranges)), dtype=np.int64)
    grids = np.meshgrid(*[np.arange(r.start, r.stop, dtype=np.int64) for r in ranges],
                        indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    if spec.exclusions:
        keep = np.ones(len(pts), dtype=bool)
        for ex in spec.exclusions:
            keep &= ~ex.excludes(pts)
        pts = pts[keep]
    return pts


def enumerate_in_box(spec: DomainSpec, box, capacity: int | None = None) -> Iterator[tuple]:
    """Yield every discrete assignment of S in the box once, lexicographically."""
    pts = discrete_points(spec, box, capacity)
    if spec.kind == "finite":
        for p in pts:
            yield tuple(float(v) for v in p)
    else:
        for p in pts:
            yield tuple(int(v) for v in p)


# ---------------------------------------------------------------------------
# Helly witnesses


def _intersection_nonempty(spec: DomainSpec, bodies: Sequence[ConvexBody], box: Box,
                           capacity: int | None) -> bool:
    if spec.is_discrete:
        pts = discrete_points(spec, box, capacity).astype(float)
        keep = np.ones(len(pts), dtype=bool)
        for body in bodies:
            keep &= body.mask(pts)
        return bool(keep.any())
    from .oracles import solve_mixed_linear  # local import: oracles depends on this module

    constraints = [c for body in bodies for c in body.constraints]
    lo, hi = box.lower.copy(), box.upper.copy()
    for body in bodies:
        if body.box is not None:
            lo = np.maximum(lo, body.box.lower)
            hi = np.minimum(hi, body.box.upper)
    if np.any(lo > hi):
        return False
    clipped = Box(lo, hi)
    sol = solve_mixed_linear(np.zeros(spec.dimension), constraints,
                             ConvexBody((), clipped), spec, capacity=capacity)
    return sol.status == "optimal"


def verify_helly_witness(spec: DomainSpec, family: Sequence[ConvexBody], box,
                         capacity: int | None = None) -> bool:
    """Check that ``family`` certifies ``h(S) >= len(family)`` inside ``box``.

    True iff every subfamily missing one member meets S in the box while the
    whole family does not.  Discrete domains are decided by enumerating
    S intersected with the box; domains with continuous coordinates require
    linear bodies and are decided by one LP per integer assignment.
    """
    family = list(family)
    if len(family) < 2:
        raise ValueError("a Helly witness needs at least two sets")
    box = as_box(box, spec.dimension)
    if spec.is_discrete:
        pts = discrete_points(spec, box, capacity).astype(float)
        masks = np.array([body.mask(pts) for body in family])
        if len(pts) == 0:
            return False
        if masks.all(axis=0).any():
            return False
        for i in range(len(family)):
            rest = np.delete(masks, i, axis=0)
            if not rest.all(axis=0).any():
                return False
        return True
    if _intersection_nonempty(spec, family, box, capacity):
        return False
    return all(
        _intersection_nonempty(spec, family[:i] + family[i + 1:], box, capacity)
        for i in range(len(family))
    )


def doignon_square_family() -> list[ConvexBody]:
    """Four triangles in [0,1]^2: any three share a corner, all four share only (1/2, 1/2)."""
    square = Box.uniform(2, 0.0, 1.0)
    return [
        ConvexBody((LinearConstraint([-1.0, -1.0], -1.0),), square),  # x + y >= 1
        ConvexBody((LinearConstraint([1.0, -1.0], 0.0),), square),    # y >= x
        ConvexBody((LinearConstraint([-1.0, 1.0], 0.0),), square),    # y <= x
        ConvexBody((LinearConstraint([1.0, 1.0], 1.0),), square),     # x + y <= 1
    ]
