"""Chance-constrained problem data, scenario drawing and violation probabilities.

Also home to the two modelling encoders: graph K-coloring as feasibility over a
lattice minus sublattices, and the slack reformulation that moves congruences
on linear forms onto new integer variables.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .domains import (TAU_FEAS, Box, Congruence, ConvexBody, DomainSpec, LinearConstraint,
                      QuadraticConstraint, helly_number)
from .oracles import SubproblemSolution, solve_subproblem

ScenarioConstraint = LinearConstraint | QuadraticConstraint
Z_95 = 1.96


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) so streams are reproducible across platforms."""
    return np.random.Generator(np.random.Philox(int(seed) & (2**64 - 1)))


# ---------------------------------------------------------------------------
# uncertainty models


@dataclass(frozen=True, eq=False)
class FiniteOmega:
    """Finitely supported distribution over scenario constraints.

    An empty model (no atoms) stands for "no uncertainty" and is used by pure
    feasibility instances.
    """

    weights: np.ndarray
    constraints: tuple[ScenarioConstraint, ...]

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        cons = tuple(self.constraints)
        if len(w) != len(cons):
            raise ValueError("one weight per atom required")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if len(w) and abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "constraints", cons)
        linear = all(isinstance(c, LinearConstraint) for c in cons)
        A = np.array([c.a for c in cons]) if linear and cons else None
        b = np.array([c.b for c in cons]) if linear and cons else None
        object.__setattr__(self, "_A", A)
        object.__setattr__(self, "_b", b)

    @classmethod
    def uniform(cls, constraints: Sequence[ScenarioConstraint]) -> FiniteOmega:
        n = len(constraints)
        return cls(np.full(n, 1.0 / n), constraints)

    @classmethod
    def empty(cls) -> FiniteOmega:
        return cls(np.zeros(0), ())

    def __len__(self) -> int:
        return len(self.constraints)

    def violated(self, x) -> np.ndarray:
        """Boolean vector: which atoms does ``x`` violate (value above ``TAU_FEAS``)."""
        x = np.asarray(x, dtype=float)
        if self._A is not None:
            return self._A @ x - self._b > TAU_FEAS
        return np.array([c.evaluate(x) > TAU_FEAS for c in self.constraints], dtype=bool)

    def violation_many(self, points: np.ndarray, chunk: int = 2048) -> np.ndarray:
        """Exact V(x) for every row of ``points``."""
        points = np.asarray(points, dtype=float)
        out = np.empty(len(points))
        for start in range(0, len(points), chunk):
            P = points[start:start + chunk]
            if self._A is not None:
                viol = (self._A @ P.T - self._b[:, None]) > TAU_FEAS
            else:
                viol = np.array([c.evaluate(P) > TAU_FEAS for c in self.constraints])
            out[start:start + chunk] = self.weights @ viol if len(self) else 0.0
        return out


@dataclass(frozen=True)
class HalfplaneSampler:
    """``a.x <= b`` with ``a`` uniform on the unit sphere and ``b`` uniform in [b_low, b_high]."""

    dimension: int
    b_low: float
    b_high: float

    def __call__(self, rng: np.random.Generator, n: int) -> list[LinearConstraint]:
        a = rng.standard_normal((n, self.dimension))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        b = rng.uniform(self.b_low, self.b_high, n)
        return [LinearConstraint(a[i], b[i]) for i in range(n)]

    def to_dict(self) -> dict:
        return {"kind": "halfplane", "dimension": self.dimension,
                "b_low": self.b_low, "b_high": self.b_high}


@dataclass(frozen=True)
class BallSampler:
    """``|x - center|^2 <= radius^2`` with the center uniform in a cube."""

    dimension: int
    center_low: float
    center_high: float
    radius: float

    def __call__(self, rng: np.random.Generator, n: int) -> list[QuadraticConstraint]:
        centers = rng.uniform(self.center_low, self.center_high, (n, self.dimension))
        eye = np.eye(self.dimension)
        return [QuadraticConstraint(eye, -2.0 * c, float(c @ c) - self.radius**2) for c in centers]

    def to_dict(self) -> dict:
        return {"kind": "ball", "dimension": self.dimension, "center_low": self.center_low,
                "center_high": self.center_high, "radius": self.radius}


@dataclass(frozen=True)
class Generative:
    """Continuous uncertainty: ``sampler(rng, n)`` returns n i.i.d. constraints.

    The sampler must be a deterministic function of the generator state.
    """

    sampler: Callable[[np.random.Generator, int], list]


UncertaintyModel = FiniteOmega | Generative


def draw_scenarios(model: UncertaintyModel, N: int, seed: int) -> list[ScenarioConstraint]:
    """Draw N i.i.d. scenario constraints, in draw order, reproducibly from ``seed``."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    rng = make_rng(seed)
    if isinstance(model, FiniteOmega):
        return [model.constraints[i] for i in draw_atom_indices(model, N, rng)]
    return list(model.sampler(rng, N))


def draw_atom_indices(model: FiniteOmega, N: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws of atom indices from a uniform stream."""
    if len(model) == 0:
        raise ValueError("cannot draw from an empty model")
    cdf = np.cumsum(model.weights)
    u = rng.random(N)
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(model) - 1)


def violation_probability_exact(x, model: FiniteOmega) -> float:
    """Total weight of the atoms violated by ``x``."""
    if not isinstance(model, FiniteOmega):
        raise TypeError("exact violation probability needs a FiniteOmega model")
    if len(model) == 0:
        return 0.0
    return float(model.weights @ model.violated(x))


def violation_probability_mc(x, model: UncertaintyModel, M: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate of V(x) from M fresh draws, with a 95% normal half-width."""
    if M < 100:
        raise ValueError("use at least 100 Monte-Carlo draws")
    x = np.asarray(x, dtype=float)
    rng = make_rng(seed)
    if isinstance(model, FiniteOmega):
        if len(model) == 0:
            return 0.0, 0.0
        hits = int(model.violated(x)[draw_atom_indices(model, M, rng)].sum())
    else:
        hits = sum(1 for con in model.sampler(rng, M) if con.evaluate(x) > TAU_FEAS)
    est = hits / M
    return est, Z_95 * math.sqrt(est * (1.0 - est) / M)


# ---------------------------------------------------------------------------
# problems


@dataclass(frozen=True, eq=False)
class ChanceProblem:
    """``min c.x  s.t.  V(x) <= epsilon,  x in K,  x in S`` with distrust ``delta``."""

    objective: np.ndarray
    deterministic_set: ConvexBody
    domain: DomainSpec
    model: UncertaintyModel = field(default_factory=FiniteOmega.empty)
    epsilon: float = 1.0
    delta: float = 0.5

    def __post_init__(self):
        c = np.array(self.objective, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "objective", c)
        if c.shape != (self.domain.dimension,):
            raise ValueError("objective length must equal the domain dimension")
        box = self.deterministic_set.box
        if self.domain.kind != "finite" and self.domain.num_integer:
            m = self.domain.num_integer
            if box is None or not (np.all(np.isfinite(box.lower[:m]))
                                   and np.all(np.isfinite(box.upper[:m]))):
                raise ValueError("the box must bound every discrete coordinate")
        if not 0.0 < self.epsilon <= 1.0 or not 0.0 < self.delta < 1.0:
            raise ValueError("need 0 < epsilon <= 1 and 0 < delta < 1")

    @property
    def dimension(self) -> int:
        return self.domain.dimension

    @property
    def helly(self) -> int | None:
        return helly_number(self.domain)

    def solve_deterministic(self, scenarios: Sequence = ()) -> SubproblemSolution:
        """Optimum over K, S and the given scenario constraints."""
        return solve_subproblem(self.objective, scenarios, self.deterministic_set, self.domain)


# ---------------------------------------------------------------------------
# graph coloring


def encode_coloring(edges: Sequence[tuple[int, int]], n: int, K: int) -> ChanceProblem:
    """Feasibility instance whose S-points are exactly the proper K-colorings.

    ``S = Z^n`` minus the lattices ``{c : c_i = c_j (mod K)}`` for each edge,
    boxed to ``[0, K-1]^n``, with zero objective and no uncertainty.
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    exclusions = []
    seen = set()
    for i, j in edges:
        if i == j:
            raise ValueError("graph must be simple (self-loop found)")
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        a = [0] * n
        a[i], a[j] = 1, -1
        exclusions.append(Congruence(tuple(a), K, 0))
    domain = DomainSpec.lattice_minus(n, exclusions)
    body = ConvexBody((), Box.uniform(n, 0, K - 1))
    return ChanceProblem(np.zeros(n), body, domain)


def find_coloring(edges: Sequence[tuple[int, int]], n: int, K: int) -> tuple[int, ...] | None:
    """Lexicographically first proper K-coloring, or None."""
    sol = encode_coloring(edges, n, K).solve_deterministic()
    if not sol.is_optimal:
        return None
    return tuple(int(round(v)) for v in sol.point)


# ---------------------------------------------------------------------------
# congruence reformulation


@dataclass(frozen=True)
class ModularConstraint:
    """``a.z`` lies in (``congruent``) or avoids (not ``congruent``) the given residues mod q.

    ``a`` covers the integer coordinates only.
    """

    a: tuple[int, ...]
    q: int
    residues: tuple[int, ...]
    congruent: bool = True

    def __post_init__(self):
        if any(float(v) != int(v) for v in self.a):
            raise ValueError("modular constraints need integer coefficients")
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        object.__setattr__(self, "residues", tuple(sorted({int(r) % self.q for r in self.residues})))
        if self.q < 2:
            raise ValueError("modulus must be >= 2")

    @property
    def excluded_residues(self) -> tuple[int, ...]:
        if self.congruent:
            return tuple(r for r in range(self.q) if r not in self.residues)
        return self.residues

    @property
    def direct_variable(self) -> int | None:
        """Index i when the form is just ``z_i``; such constraints need no slack."""
        nz = [i for i, v in enumerate(self.a) if v != 0]
        if len(nz) == 1 and self.a[nz[0]] == 1:
            return nz[0]
        return None

    def satisfied(self, z) -> bool:
        value = int(np.dot(np.asarray(z, dtype=np.int64), self.a)) % self.q
        return (value in self.residues) == self.congruent


@dataclass(frozen=True, eq=False)
class ModularProgram:
    """An integer or mixed program with congruence side constraints on the integer part."""

    objective: np.ndarray
    body: ConvexBody
    domain: DomainSpec
    congruences: tuple[ModularConstraint, ...] = ()
    model: UncertaintyModel = field(default_factory=FiniteOmega.empty)
    epsilon: float = 1.0
    delta: float = 0.5

    def __post_init__(self):
        if self.domain.kind not in ("integers", "mixed"):
            raise ValueError("modular programs live on integer or mixed domains")
        object.__setattr__(self, "congruences", tuple(self.congruences))
        for con in self.congruences:
            if len(con.a) != self.domain.num_integer:
                raise ValueError("congruence coefficients must cover the integer coordinates")

    def feasible(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        z = np.round(x[: self.domain.num_integer]).astype(np.int64)
        return self.body.contains(x) and all(c.satisfied(z) for c in self.congruences)

    @property
    def slack_forms(self) -> list[ModularConstraint]:
        return [c for c in self.congruences if c.direct_variable is None]

    def lift(self, x) -> np.ndarray:
        """Original point -> reformulated point ``(z, y(z), continuous)``."""
        x = np.asarray(x, dtype=float)
        m = self.domain.num_integer
        y = [float(np.dot(c.a, x[:m])) for c in self.slack_forms]
        return np.concatenate([x[:m], y, x[m:]])

    def project(self, x_new) -> np.ndarray:
        """Reformulated point -> original point (drops the slacks)."""
        x_new = np.asarray(x_new, dtype=float)
        m, s = self.domain.num_integer, len(self.slack_forms)
        return np.concatenate([x_new[:m], x_new[m + s:]])


def _lift_constraint(con, positions, dimension):
    return con.lifted(positions, dimension)


def _lift_model(model: UncertaintyModel, positions, dimension) -> UncertaintyModel:
    if isinstance(model, FiniteOmega):
        return FiniteOmega(model.weights, [c.lifted(positions, dimension) for c in model.constraints])
    inner = model.sampler
    return Generative(lambda rng, n: [c.lifted(positions, dimension) for c in inner(rng, n)])


def reformulate_congruences(program: ModularProgram) -> ChanceProblem:
    """Move congruences on linear forms onto integer slack variables.

    Each congruence on a form ``a.z`` that is not a single variable gets a slack
    ``y = a.z`` (two opposing inequalities) and the congruence becomes a domain
    exclusion on ``y``.  Congruences on single variables become exclusions
    directly.  Coordinates of the result are ordered
    ``(original integers, slacks, continuous)``; see :meth:`ModularProgram.lift`.
    """
    dom = program.domain
    m, k = dom.num_integer, dom.num_continuous
    if not program.congruences:
        return ChanceProblem(program.objective, program.body, dom, program.model,
                             program.epsilon, program.delta)
    forms = program.slack_forms
    s = len(forms)
    d_new = m + s + k
    positions = list(range(m)) + list(range(m + s, d_new))

    exclusions = []
    slack_index = 0
    for con in program.congruences:
        direct = con.direct_variable
        if direct is None:
            coeff = [0] * (m + s)
            coeff[m + slack_index] = 1
            slack_index += 1
        else:
            coeff = [0] * (m + s)
            coeff[direct] = 1
        exclusions.extend(Congruence(tuple(coeff), con.q, r) for r in con.excluded_residues)

    rows = [c.lifted(positions, d_new) for c in program.body.constraints]
    for j, con in enumerate(forms):
        a = np.zeros(d_new)
        a[:m] = con.a
        a[m + j] = -1.0
        rows.append(LinearConstraint(a, 0.0, label=f"slack{j + 1}<="))
        rows.append(LinearConstraint(-a, 0.0, label=f"slack{j + 1}>="))

    box = program.body.box if program.body.box is not None else Box.unbounded(dom.dimension)
    lo, hi = box.lower, box.upper
    slack_lo, slack_hi = [], []
    for con in forms:
        a = np.asarray(con.a, dtype=float)
        with np.errstate(invalid="ignore"):
            lo_terms = np.where(a > 0, a * lo[:m], np.where(a < 0, a * hi[:m], 0.0))
            hi_terms = np.where(a > 0, a * hi[:m], np.where(a < 0, a * lo[:m], 0.0))
        slack_lo.append(lo_terms.sum())
        slack_hi.append(hi_terms.sum())
    new_box = Box(np.concatenate([lo[:m], slack_lo, lo[m:]]),
                  np.concatenate([hi[:m], slack_hi, hi[m:]]))

    domain = DomainSpec.lattice_minus(m + s, exclusions, num_continuous=k)
    objective = np.zeros(d_new)
    objective[positions] = program.objective
    return ChanceProblem(objective, ConvexBody(rows, new_box), domain,
                         _lift_model(program.model, positions, d_new),
                         program.epsilon, program.delta)


def brute_force_colorable(edges: Sequence[tuple[int, int]], n: int, K: int) -> bool:
    """Direct check over all K^n assignments; independent of the lattice encoding."""
    return any(all(col[i] != col[j] for i, j in edges)
               for col in itertools.product(range(K), repeat=n))


def with_model(problem: ChanceProblem, model: UncertaintyModel, epsilon: float | None = None,
               delta: float | None = None) -> ChanceProblem:
    return replace(problem, model=model,
                   epsilon=problem.epsilon if epsilon is None else epsilon,
                   delta=problem.delta if delta is None else delta)
