"""Violator spaces induced by S-convex programs, and Clarkson's basis algorithm.

A constraint ``h`` violates a subset ``G`` when adding ``h`` changes the
uniquely selected optimum of ``G``.  Adding a constraint can only make the
optimum worse under the total order, so for a feasible ``G`` this is the same
as ``x_G`` failing ``h``; :meth:`ViolationContext.violators` uses that point
test, while :func:`violates` keeps the literal two-solve definition.
Infeasible subsets violate nothing.

Every primitive test and every oracle solve is counted per run.
"""
from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .domains import TAU_FEAS, ConvexBody, DomainSpec, LinearConstraint, helly_number
from .oracles import SubproblemSolution, compare_solutions, make_oracle
from .problems import make_rng
from .simplex import OPTIMAL

MAX_ROUNDS = 10_000
MAX_WEIGHT = 2**62


class ClarksonDiagnosticError(RuntimeError):
    """Raised when Clarkson's algorithm exceeds its round cap."""


def constraint_digest(con) -> bytes:
    """Content hash of a constraint record, independent of its position in a list."""
    h = hashlib.sha256()
    if isinstance(con, LinearConstraint):
        h.update(b"L")
        h.update(np.ascontiguousarray(con.a, dtype=float).tobytes())
        h.update(np.float64(con.b).tobytes())
    else:
        h.update(b"Q")
        for part in (con.Q, con.q, np.float64(con.c0)):
            h.update(np.ascontiguousarray(part, dtype=float).tobytes())
    return h.digest()


@dataclass
class RunStats:
    primitive_calls: int = 0
    oracle_solves: int = 0
    cache_hits: int = 0
    base_calls: int = 0
    outer_rounds: int = 0
    restarts: int = 0
    reweight_rounds: int = 0
    doublings: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Basis:
    indices: tuple[int, ...]
    solution: SubproblemSolution
    stats: RunStats = field(default_factory=RunStats)

    def __len__(self) -> int:
        return len(self.indices)


class ViolatorInstance:
    """Constraint list H over a fixed base problem (objective, K, S).

    ``comb_dim`` defaults to ``h(S) - 1``.  ``tie_break=False`` compares optima
    by value only; it exists to demonstrate what breaks without a total order.
    """

    def __init__(self, objective, body: ConvexBody, domain: DomainSpec, constraints: Sequence,
                 comb_dim: int | None = None, tie_break: bool = True,
                 capacity: int | None = None):
        self.objective = np.asarray(objective, dtype=float)
        self.body = body
        self.domain = domain
        self.constraints = tuple(constraints)
        if comb_dim is None:
            h = helly_number(domain)
            if h is None:
                raise ValueError("Helly number unknown: set helly_override on the domain")
            comb_dim = h - 1
        if comb_dim < 1:
            raise ValueError("combinatorial dimension must be at least 1")
        self.comb_dim = int(comb_dim)
        self.tie_break = tie_break
        self.oracle = make_oracle(self.objective, body, domain, self.constraints, capacity)
        linear = all(isinstance(c, LinearConstraint) for c in self.constraints)
        if linear and self.constraints:
            self._A = np.array([c.a for c in self.constraints])
            self._b = np.array([c.b for c in self.constraints])
        else:
            self._A = self._b = None

    def __len__(self) -> int:
        return len(self.constraints)

    def context(self) -> ViolationContext:
        return ViolationContext(self)

    def canonical_order(self) -> list[int]:
        """Indices sorted by constraint content, so sampling ignores input order."""
        return sorted(range(len(self)), key=lambda i: (constraint_digest(self.constraints[i]), i))

    def fails(self, x: np.ndarray, indices: np.ndarray) -> np.ndarray:
        """Which of ``indices`` does the point ``x`` fail (beyond ``TAU_FEAS``)."""
        indices = np.asarray(indices, dtype=int)
        if self._A is not None:
            return self._A[indices] @ x - self._b[indices] > TAU_FEAS
        return np.array([self.constraints[i].evaluate(x) > TAU_FEAS for i in indices], dtype=bool)


class ViolationContext:
    """Per-run solve cache and counters.  Not shared between runs."""

    def __init__(self, instance: ViolatorInstance):
        self.instance = instance
        self.stats = RunStats()
        self._cache: dict[frozenset, SubproblemSolution] = {}

    def solve(self, G: Iterable[int]) -> SubproblemSolution:
        key = frozenset(G)
        hit = self._cache.get(key)
        if hit is not None:
            self.stats.cache_hits += 1
            return hit
        self.stats.oracle_solves += 1
        sol = self.instance.oracle.solve(sorted(key))
        self._cache[key] = sol
        return sol

    def same(self, a: SubproblemSolution, b: SubproblemSolution) -> bool:
        return compare_solutions(a, b, self.instance.tie_break) == 0

    def violates(self, G: Iterable[int], h: int) -> bool:
        """Literal definition: does adding ``h`` change the optimum of ``G``?"""
        G = frozenset(G)
        self.stats.primitive_calls += 1
        base = self.solve(G)
        if base.status == "infeasible":
            return False
        return not self.same(base, self.solve(G | {h}))

    def violators(self, G: Iterable[int], among: Sequence[int]) -> list[int]:
        """Members of ``among`` that violate ``G``."""
        G = frozenset(G)
        among = list(among)
        self.stats.primitive_calls += len(among)
        sol = self.solve(G)
        if sol.status == "infeasible" or not among:
            return []
        if sol.status != OPTIMAL or not self.instance.tie_break:
            return [h for h in among if not self.same(sol, self.solve(G | {h}))]
        mask = self.instance.fails(sol.point, np.array(among))
        return [h for h, bad in zip(among, mask) if bad]

    def deletion_basis(self, G: Sequence[int]) -> list[int]:
        """Drop constraints one at a time while the optimum stays put.

        The result is inclusion-minimal; by the Helly argument its size is at
        most ``comb_dim`` for feasible G and ``comb_dim + 1`` for infeasible G.
        """
        self.stats.base_calls += 1
        target = self.solve(G)
        B = list(G)
        for g in list(B):
            self.stats.primitive_calls += 1
            rest = [x for x in B if x != g]
            if self.same(self.solve(rest), target):
                B = rest
        return B


def violates(instance: ViolatorInstance, G: Iterable[int], h: int) -> bool:
    return instance.context().violates(G, h)


def brute_force_basis(instance: ViolatorInstance, G: Sequence[int],
                      ctx: ViolationContext | None = None) -> Basis:
    """Smallest subset of ``G`` (first in lexicographic subset order) with the same optimum.

    Subsets up to ``comb_dim`` are scanned, or ``comb_dim + 1`` when ``G`` is
    infeasible.  Falls back to ``G`` itself if nothing smaller matches, which
    would mean the combinatorial dimension was understated.
    """
    ctx = ctx or instance.context()
    G = sorted(G)
    target = ctx.solve(G)
    limit = instance.comb_dim + (1 if target.status == "infeasible" else 0)
    for size in range(min(limit, len(G)) + 1):
        for subset in itertools.combinations(G, size):
            if ctx.same(ctx.solve(subset), target):
                return Basis(tuple(subset), target, ctx.stats)
    return Basis(tuple(G), target, ctx.stats)


def _weighted_sample(rng: np.random.Generator, items: list[int], weights: np.ndarray,
                     size: int) -> list[int]:
    p = weights / weights.sum()
    picks = rng.choice(len(items), size=size, replace=True, p=p)
    return sorted({items[i] for i in picks})


def _reweight_stage(ctx: ViolationContext, G: list[int], rng: np.random.Generator,
                    rounds: list[int]) -> list[int]:
    """Basis of G by iterative reweighting; small inputs go straight to the base case."""
    delta = ctx.instance.comb_dim
    sample_size = 6 * delta * delta
    if len(G) <= sample_size:
        return ctx.deletion_basis(G)
    weights = np.ones(len(G), dtype=np.int64)
    position = {g: i for i, g in enumerate(G)}
    while True:
        rounds[0] += 1
        ctx.stats.reweight_rounds += 1
        if rounds[0] > MAX_ROUNDS:
            raise ClarksonDiagnosticError("reweighting exceeded the round cap")
        R = _weighted_sample(rng, G, weights.astype(float), sample_size)
        B = ctx.deletion_basis(R)
        V = ctx.violators(B, [g for g in G if g not in set(R)])
        if not V:
            return B
        idx = [position[v] for v in V]
        if weights[idx].sum() * 3 * delta <= weights.sum():
            if weights[idx].max() >= MAX_WEIGHT:
                raise ClarksonDiagnosticError("multiplicities overflowed 64 bits")
            weights[idx] *= 2
            ctx.stats.doublings += 1


def clarkson_basis(instance: ViolatorInstance, seed: int) -> Basis:
    """Basis of all of H by Clarkson's sampling scheme.

    Small H (at most ``max(9 d^2, 50)`` for combinatorial dimension d) is
    handled directly.  Otherwise an outer loop grows a mandatory set from the
    violators of sampled bases, restarting whenever a sample leaves more than
    ``2 sqrt(m)`` violators, and bases of the sampled sets come from the
    reweighting stage.  Sampling walks the constraints in content order, so the
    result does not depend on how H was listed.
    """
    ctx = instance.context()
    m = len(instance)
    delta = instance.comb_dim
    order = instance.canonical_order()
    rng = make_rng(seed)
    rounds = [0]

    if m <= max(9 * delta * delta, 50):
        B = ctx.deletion_basis(order)
    else:
        root = math.sqrt(m)
        r = min(m, delta * math.ceil(root))
        G: set[int] = set()
        while True:
            rounds[0] += 1
            ctx.stats.outer_rounds += 1
            if rounds[0] > MAX_ROUNDS:
                raise ClarksonDiagnosticError("outer stage exceeded the round cap")
            picks = rng.choice(m, size=r, replace=False)
            R = {order[i] for i in picks}
            members = [i for i in order if i in G or i in R]
            B = _reweight_stage(ctx, members, rng, rounds)
            in_set = G | R
            V = ctx.violators(B, [i for i in order if i not in in_set])
            if not V:
                break
            if len(V) > 2 * root:
                ctx.stats.restarts += 1
                continue
            G.update(V)
    indices = tuple(sorted(B))
    return Basis(indices, ctx.solve(indices), ctx.stats)


# ---------------------------------------------------------------------------
# axiom checks


@dataclass
class AxiomReport:
    chains: int = 0
    consistency: list[dict] = field(default_factory=list)
    locality: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.consistency and not self.locality

    def to_dict(self) -> dict:
        return {"chains": self.chains, "consistency": self.consistency,
                "locality": self.locality, "ok": self.ok}


def violator_set(ctx: ViolationContext, G: Iterable[int]) -> frozenset[int]:
    """V(G) over all of H, by the literal two-solve test."""
    G = frozenset(G)
    return frozenset(h for h in range(len(ctx.instance)) if ctx.violates(G, h))


def check_axioms(instance: ViolatorInstance, sample_count: int, seed: int) -> AxiomReport:
    """Sample chains F <= G <= H and test consistency and locality exhaustively.

    G is built as F plus a random subset of the constraints outside F that do
    not violate F, so the locality premise always holds and each chain is a
    real test of the axiom.
    """
    report = AxiomReport()
    m = len(instance)
    if m == 0:
        return report
    ctx = instance.context()
    rng = make_rng(seed)
    for _ in range(sample_count):
        report.chains += 1
        F = frozenset(int(i) for i in np.flatnonzero(rng.random(m) < rng.random()))
        VF = violator_set(ctx, F)
        free = [h for h in range(m) if h not in F and h not in VF]
        extra = {h for h in free if rng.random() < 0.5}
        G = F | extra
        VG = violator_set(ctx, G)
        for S, VS in ((F, VF), (G, VG)):
            if S & VS:
                report.consistency.append({"G": sorted(S), "V(G)": sorted(VS)})
        if VF != VG:
            report.locality.append({"F": sorted(F), "G": sorted(G),
                                    "V(F)": sorted(VF), "V(G)": sorted(VG)})
    return report
