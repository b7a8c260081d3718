import numpy as np
import pytest

from shelly.domains import Box, ConvexBody, DomainSpec, LinearConstraint, contains
from shelly.instances import random_lattice_instance, reference_halfplanes, reference_problem
from shelly.oracles import compare_solutions, solve_enumeration
from shelly.problems import (BallSampler, ChanceProblem, FiniteOmega, Generative, HalfplaneSampler,
                             draw_scenarios)
from shelly.scenario import exact_ccp_value, experiment, run_ccp, solve_scp

REF_J_02 = -65.0  # full 101 x 101 scan of the reference instance, see test_reference_j_eps


def lattice_problem(cons, c=(1.0, 1.0), eps=0.2, delta=0.1, half=10):
    body = ConvexBody((), Box.uniform(2, -half, half))
    return ChanceProblem(np.array(c), body, DomainSpec.integers(2), FiniteOmega.uniform(cons), eps, delta)


class TestSolveScp:
    def test_no_scenarios(self):
        problem = lattice_problem([LinearConstraint([1, 0], 0)])
        run = solve_scp(problem, [])
        assert run.solution.point.tolist() == [-10.0, -10.0]

    def test_dominating_scenario_is_the_witness(self):
        cons = [LinearConstraint([-1, -1], 3), LinearConstraint([-1, 0], 20), LinearConstraint([0, -1], 30)]
        problem = lattice_problem(cons)
        for engine in ("direct", "clarkson"):
            run = solve_scp(problem, cons, engine, witness=True)
            assert run.witness_constraints == [cons[0]]

    @pytest.mark.parametrize("seed", range(10))
    def test_engines_agree(self, seed):
        c, body, dom, cons = random_lattice_instance(100, seed)
        problem = ChanceProblem(c, body, dom, FiniteOmega.uniform(cons))
        a = solve_scp(problem, cons, "direct")
        b = solve_scp(problem, cons, "clarkson", seed=seed)
        assert compare_solutions(a.solution, b.solution) == 0
        assert a.solution.point.tobytes() == b.solution.point.tobytes()

    def test_bad_engine(self):
        with pytest.raises(ValueError):
            solve_scp(lattice_problem([LinearConstraint([1, 0], 0)]), [], "simplex")


class TestRunCcp:
    def test_sample_size_lattice(self):
        run = run_ccp(reference_problem(), seed=0)
        assert run.N == 78 and len(run.scenarios) == 78

    def test_sample_size_mixed(self):
        cons = [LinearConstraint([1, 0], 2), LinearConstraint([0, 1], 3)]
        problem = ChanceProblem([1, 1], ConvexBody((), Box([-3, -5], [3, 5])), DomainSpec.mixed(1, 1),
                                FiniteOmega.uniform(cons), 0.2, 0.1)
        assert run_ccp(problem).N == 78

    def test_exact_violation(self):
        problem = reference_problem()
        run = run_ccp(problem, seed=3)
        x = run.solution.point
        scan = sum(1 for con in reference_halfplanes() if con.a @ x - con.b > 1e-9) / 1000
        assert run.violation == pytest.approx(scan, abs=1e-12)
        assert run.violation_half_width is None

    def test_unknown_helly(self):
        dom = DomainSpec.lattice_minus(2, [])
        problem = ChanceProblem([1, 1], ConvexBody((), Box.uniform(2, -2, 2)), dom,
                                FiniteOmega.uniform([LinearConstraint([1, 0], 1)]))
        with pytest.raises(ValueError, match="helly_override"):
            run_ccp(problem)

    def test_override_makes_it_run(self):
        dom = DomainSpec.lattice_minus(2, [], helly_override=4)
        problem = ChanceProblem([1, 1], ConvexBody((), Box.uniform(2, -2, 2)), dom,
                                FiniteOmega.uniform([LinearConstraint([1, 0], 1)]), 0.2, 0.1)
        assert run_ccp(problem).N == 78

    def test_generative_uses_monte_carlo(self):
        problem = ChanceProblem([1, 1], ConvexBody((), Box.uniform(2, -20, 20)), DomainSpec.integers(2),
                                Generative(HalfplaneSampler(2, 5.0, 15.0)), 0.2, 0.1)
        run = run_ccp(problem, seed=1, mc_samples=20_000)
        assert run.solution.is_optimal
        assert 0.0 <= run.violation <= 1.0
        assert run.violation_half_width is not None

    def test_quadratic_generative(self):
        problem = ChanceProblem([1, 0], ConvexBody((), Box.uniform(2, -6, 6)), DomainSpec.integers(2),
                                Generative(BallSampler(2, -0.5, 0.5, 4.0)), 0.2, 0.1)
        run = run_ccp(problem, seed=2, mc_samples=2000, witness=True)
        assert run.solution.is_optimal
        assert len(run.witness) <= 3

    @pytest.mark.parametrize("seed", range(8))
    def test_run_invariants(self, seed):
        problem = reference_problem()
        run = run_ccp(problem, "clarkson", seed)
        x = run.solution.point
        assert contains(problem.domain, x) and problem.deterministic_set.contains(x)
        assert all(con.evaluate(x) <= 1e-9 for con in run.scenarios)
        assert len(run.witness) <= problem.helly - 1
        again = solve_enumeration(problem.objective, run.witness_constraints,
                                  problem.deterministic_set, problem.domain)
        assert again.point.tobytes() == x.tobytes()

    def test_deterministic(self):
        a = run_ccp(reference_problem(), "clarkson", 11)
        b = run_ccp(reference_problem(), "clarkson", 11)
        assert a.to_dict() == b.to_dict()

    def test_infeasible_run(self):
        cons = [LinearConstraint([1, 0], -20)]  # nothing in the box satisfies it
        run = run_ccp(lattice_problem(cons), seed=0)
        assert run.status == "infeasible"
        assert run.violation is None


class TestExactValue:
    def test_eps_one_is_plain_optimum(self):
        problem = reference_problem()
        assert exact_ccp_value(problem, 1.0).point.tolist() == [-50.0, -50.0]

    def test_eps_zero_single_survivor(self):
        # the only box point that avoids the atom is (2, 2)
        cons = [LinearConstraint([-1, 0], -2), LinearConstraint([0, -1], -2)]
        problem = ChanceProblem([1, 1], ConvexBody((), Box.uniform(2, 0, 2)), DomainSpec.integers(2),
                                FiniteOmega([0.5, 0.5], cons), 1.0, 0.5)
        sol = exact_ccp_value(problem, 0.0)
        assert sol.point.tolist() == [2.0, 2.0] and sol.value == 4.0

    def test_infeasible_level(self):
        cons = [LinearConstraint([1, 0], -100)]
        problem = lattice_problem(cons)
        assert exact_ccp_value(problem, 0.5).status == "infeasible"

    def test_reference_j_eps(self):
        A = np.array([c.a for c in reference_halfplanes()])
        b = np.array([c.b for c in reference_halfplanes()])
        best = None
        for x in range(-50, 51):
            for y in range(-50, 51):
                v = np.count_nonzero(A @ np.array([x, y]) - b > 1e-9) / 1000
                if v <= 0.2 and (best is None or x + y < best):
                    best = x + y
        assert best == REF_J_02
        assert exact_ccp_value(reference_problem(), 0.2).value == REF_J_02

    def test_mixed_integer_only_chance_constraints(self):
        cons = [LinearConstraint([1, 0], -1), LinearConstraint([-1, 0], -2)]
        body = ConvexBody((LinearConstraint([-1, -1], 0),), Box([-3, -10], [3, 10]))
        problem = ChanceProblem([0, 1], body, DomainSpec.mixed(1, 1), FiniteOmega([0.3, 0.7], cons),
                                0.5, 0.1)
        # V(z) = 0.3 for z > -1, 0.7 for z < 2: level 0.5 forces z >= 2 (V = 0.3), then y >= -z
        sol = exact_ccp_value(problem, 0.5)
        np.testing.assert_allclose(sol.point, [3, -3])

    def test_mixed_with_continuous_chance_constraints(self):
        problem = ChanceProblem([0, 1], ConvexBody((), Box([-3, -10], [3, 10])), DomainSpec.mixed(1, 1),
                                FiniteOmega.uniform([LinearConstraint([0, 1], 1)]))
        with pytest.raises(ValueError):
            exact_ccp_value(problem, 0.5)


class TestExperiment:
    def test_counts_add_up(self):
        report = experiment(reference_problem(), 20, "direct", 100)
        assert report.failures + report.successes + report.infeasible_trials == 20
        assert report.empirical_failure_rate == report.failures / 20
        assert len(report.per_trial) == 20 and report.N == 78
        assert report.epsilon1 == pytest.approx(1 - 0.9 ** (1 / 78))
        assert report.j_epsilon == REF_J_02

    def test_infeasible_trials_reported(self):
        cons = [LinearConstraint([1, 0], -20)] * 3 + [LinearConstraint([1, 0], 5)] * 7
        report = experiment(lattice_problem(cons, eps=0.5, delta=0.3), 10, "direct", 0)
        assert report.infeasible_trials > 0
        assert report.notes
        feasible = 10 - report.infeasible_trials
        if feasible:
            assert report.failure_rate_given_feasible == report.failures / feasible

    def test_csv(self):
        report = experiment(reference_problem(), 3, "clarkson", 0)
        lines = report.to_csv().splitlines()
        assert lines[0] == "trial,N,status,value,violation,oracle_calls"
        assert len(lines) == 4 and lines[1].startswith("0,78,optimal,")

    def test_generative_skips_sandwich(self):
        problem = ChanceProblem([1, 1], ConvexBody((), Box.uniform(2, -20, 20)), DomainSpec.integers(2),
                                Generative(HalfplaneSampler(2, 5.0, 15.0)), 0.3, 0.2)
        report = experiment(problem, 2, "direct", 0)
        assert report.j_epsilon is None and report.notes

    def test_reproducible(self):
        a = experiment(reference_problem(), 5, "direct", 42).to_dict()
        b = experiment(reference_problem(), 5, "direct", 42).to_dict()
        assert a == b


def test_draws_are_what_the_run_uses():
    problem = reference_problem()
    run = run_ccp(problem, seed=9)
    assert list(run.scenarios) == draw_scenarios(problem.model, 78, 9)
