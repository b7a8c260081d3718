"""Scenario pipeline: size the sample, draw it, solve the sampled program, certify.

Feasibility at level eps means ``V(x) <= eps``; a run fails when ``V(x_N) > eps``.
Ties at exactly eps therefore count as feasible for the exact chance-constrained
values and as non-failures for the sampled solution, which keeps both
comparisons on the conservative side.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bounds import theorem1_sample_size, theorem2_epsilon1
from .domains import LinearConstraint, discrete_points
from .oracles import (TAU_CMP, SubproblemSolution, _linear_rows, _mixed_solve, _select_min,
                      solve_subproblem)
from .problems import (ChanceProblem, FiniteOmega, draw_scenarios,
                       violation_probability_exact, violation_probability_mc)
from .simplex import OPTIMAL
from .violator import Basis, ViolatorInstance, clarkson_basis

LEVEL_SLACK = 1e-12
MC_SAMPLES = 100_000
ENGINES = ("direct", "clarkson")


@dataclass(frozen=True, eq=False)
class ScenarioRun:
    N: int
    scenarios: tuple
    solution: SubproblemSolution
    witness: Basis | None
    violation: float | None
    violation_half_width: float | None = None
    engine: str = "direct"
    seed: int = 0
    oracle_calls: int = 0

    @property
    def status(self) -> str:
        return self.solution.status

    @property
    def witness_constraints(self) -> list:
        if self.witness is None:
            return []
        return [self.scenarios[i] for i in self.witness.indices]

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "engine": self.engine,
            "seed": self.seed,
            "solution": self.solution.to_dict(),
            "witness": None if self.witness is None else list(self.witness.indices),
            "violation": self.violation,
            "violation_half_width": self.violation_half_width,
            "oracle_calls": self.oracle_calls,
            "stats": None if self.witness is None else self.witness.stats.to_dict(),
        }


def _mc_seed(seed: int) -> int:
    # independent of the scenario stream drawn from the same trial seed
    return int(np.random.SeedSequence([int(seed) & (2**64 - 1), 1]).generate_state(1, np.uint64)[0])


def solve_scp(problem: ChanceProblem, scenarios: Sequence, engine: str = "direct", seed: int = 0,
              witness: bool = False, capacity: int | None = None) -> ScenarioRun:
    """Solve the sampled program over K, S and the given scenarios.

    ``engine="direct"`` makes one oracle call over everything.  ``"clarkson"``
    runs the randomized basis algorithm and always yields a witness; with the
    direct engine a minimal witness is extracted only when ``witness`` is set.
    """
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
    scenarios = tuple(scenarios)
    if engine == "clarkson" or witness:
        instance = ViolatorInstance(problem.objective, problem.deterministic_set, problem.domain,
                                    scenarios, capacity=capacity)
    if engine == "clarkson":
        basis = clarkson_basis(instance, seed)
        return ScenarioRun(len(scenarios), scenarios, basis.solution, basis, None,
                           engine=engine, seed=seed, oracle_calls=basis.stats.primitive_calls)
    sol = solve_subproblem(problem.objective, scenarios, problem.deterministic_set,
                           problem.domain, capacity)
    basis = None
    if witness:
        ctx = instance.context()
        indices = tuple(sorted(ctx.deletion_basis(list(range(len(scenarios))))))
        basis = Basis(indices, sol, ctx.stats)
    return ScenarioRun(len(scenarios), scenarios, sol, basis, None, engine=engine, seed=seed,
                       oracle_calls=1)


def sample_size(problem: ChanceProblem) -> int:
    h = problem.helly
    if h is None:
        raise ValueError("the Helly number of this domain is unknown; "
                         "pass helly_override when building the domain")
    return theorem1_sample_size(h, problem.epsilon, problem.delta)


def run_ccp(problem: ChanceProblem, engine: str = "direct", seed: int = 0,
            mc_samples: int = MC_SAMPLES, witness: bool = False,
            capacity: int | None = None) -> ScenarioRun:
    """One scenario run at the sample size guaranteeing ``P[V(x_N) > eps] < delta``."""
    N = sample_size(problem)
    model = problem.model
    if isinstance(model, FiniteOmega) and len(model) == 0:
        scenarios = []
    else:
        scenarios = draw_scenarios(model, N, seed)
    run = solve_scp(problem, scenarios, engine, seed, witness, capacity)
    violation = half = None
    if run.solution.is_optimal:
        if isinstance(model, FiniteOmega):
            violation = violation_probability_exact(run.solution.point, model)
        else:
            violation, half = violation_probability_mc(run.solution.point, model, mc_samples,
                                                       _mc_seed(seed))
    return ScenarioRun(N, run.scenarios, run.solution, run.witness, violation, half,
                       engine, seed, run.oracle_calls)


def chance_constraints_integer_only(problem: ChanceProblem) -> bool:
    """True when every atom of a finite model ignores the continuous coordinates."""
    m = problem.domain.num_integer
    if not isinstance(problem.model, FiniteOmega):
        return False
    for con in problem.model.constraints:
        if not isinstance(con, LinearConstraint) or np.any(con.a[m:] != 0.0):
            return False
    return True


def exact_ccp_value(problem: ChanceProblem, eps_level: float,
                    capacity: int | None = None) -> SubproblemSolution:
    """Exact minimum of ``c.x`` over ``{x in S cap K : V(x) <= eps_level}``.

    Discrete domains are scanned point by point.  Mixed domains are supported
    when the chance constraints involve only the integer coordinates: each
    admissible integer assignment then gets an ordinary LP over K.
    """
    model = problem.model
    if not isinstance(model, FiniteOmega):
        raise TypeError("exact chance-constrained values need a FiniteOmega model")
    body, domain = problem.deterministic_set, problem.domain
    if domain.is_discrete:
        pts = discrete_points(domain, body.box, capacity).astype(float)
        pts = pts[body.mask(pts)]
        ok = model.violation_many(pts) <= eps_level + LEVEL_SLACK
        return _select_min(pts, pts @ problem.objective, ok)
    if not chance_constraints_integer_only(problem):
        raise ValueError("exact values on mixed domains need chance constraints "
                         "on the integer coordinates only")
    m = domain.num_integer
    assignments = discrete_points(domain, body.box, capacity)
    lifted = np.zeros((len(assignments), domain.dimension))
    lifted[:, :m] = assignments
    keep = model.violation_many(lifted) <= eps_level + LEVEL_SLACK
    A, b = _linear_rows(list(body.constraints), domain.dimension)
    return _mixed_solve(problem.objective, A, b, body.box, assignments[keep], m)


@dataclass
class ExperimentReport:
    trials: int
    N: int
    h: int
    epsilon: float
    delta: float
    engine: str
    base_seed: int
    failures: int = 0
    successes: int = 0
    infeasible_trials: int = 0
    empirical_failure_rate: float = 0.0
    failure_rate_given_feasible: float | None = None
    epsilon1: float | None = None
    j_epsilon: float | None = None
    j_epsilon1: float | None = None
    lower_sandwich_fraction: float | None = None
    upper_sandwich_fraction: float | None = None
    per_trial_values: list = field(default_factory=list)
    per_trial: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["trial", "N", "status", "value", "violation", "oracle_calls"])
        for row in self.per_trial:
            writer.writerow([row["trial"], row["N"], row["status"],
                             "" if row["value"] is None else repr(row["value"]),
                             "" if row["violation"] is None else repr(row["violation"]),
                             row["oracle_calls"]])
        return buf.getvalue()


def _leq(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a <= b
    return a <= b + TAU_CMP * max(1.0, abs(a), abs(b))


def experiment(problem: ChanceProblem, trials: int, engine: str = "direct", base_seed: int = 0,
               capacity: int | None = None) -> ExperimentReport:
    """Repeat :func:`run_ccp` with seeds ``base_seed + t`` and certify the guarantees.

    ``empirical_failure_rate`` divides the failures (feasible trials with
    ``V(x_N) > eps``) by all trials; ``failure_rate_given_feasible`` divides by
    the feasible trials only.  The two sandwich fractions are taken over
    feasible trials: ``J^eps <= J^N`` and ``J^N <= J^eps1`` with
    ``eps1 = 1 - (1 - delta)^(1/N)``.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    N = sample_size(problem)
    report = ExperimentReport(trials, N, problem.helly, problem.epsilon, problem.delta,
                              engine, base_seed)
    for t in range(trials):
        seed = base_seed + t
        run = run_ccp(problem, engine, seed, capacity=capacity)
        value = run.solution.value if run.solution.is_optimal else None
        if run.status != OPTIMAL:
            report.infeasible_trials += 1
        elif run.violation > problem.epsilon + LEVEL_SLACK:
            report.failures += 1
        else:
            report.successes += 1
        report.per_trial_values.append(value)
        report.per_trial.append({
            "trial": t, "seed": seed, "N": N, "status": run.status, "value": value,
            "violation": run.violation, "oracle_calls": run.oracle_calls,
            "witness_size": None if run.witness is None else len(run.witness),
        })
    feasible = trials - report.infeasible_trials
    report.empirical_failure_rate = report.failures / trials
    if feasible:
        report.failure_rate_given_feasible = report.failures / feasible
    if report.infeasible_trials:
        report.notes.append(f"{report.infeasible_trials} trials had an infeasible sampled program")

    report.epsilon1 = theorem2_epsilon1(problem.delta, N)
    exact_ok = isinstance(problem.model, FiniteOmega) and (
        problem.domain.is_discrete or chance_constraints_integer_only(problem))
    if not exact_ok:
        report.notes.append("exact chance-constrained values unavailable; sandwich checks skipped")
        return report
    j_eps = exact_ccp_value(problem, problem.epsilon, capacity)
    j_eps1 = exact_ccp_value(problem, report.epsilon1, capacity)
    report.j_epsilon = j_eps.value if j_eps.is_optimal else None
    report.j_epsilon1 = j_eps1.value if j_eps1.is_optimal else None
    values = [v for v in report.per_trial_values if v is not None]
    if values:
        lo = math.inf if report.j_epsilon is None else report.j_epsilon
        hi = math.inf if report.j_epsilon1 is None else report.j_epsilon1
        report.lower_sandwich_fraction = sum(_leq(lo, v) for v in values) / len(values)
        report.upper_sandwich_fraction = sum(_leq(v, hi) for v in values) / len(values)
    return report
