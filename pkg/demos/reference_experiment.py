"""Certify the sample size on the shipped reference instance.

Two hundred independent draws of N = 78 halfplanes out of a 1000-atom
distribution; every sampled optimum gets its exact violation probability.
"""
import numpy as np

from shelly.instances import reference_problem
from shelly.scenario import experiment

problem = reference_problem()
report = experiment(problem, trials=200, engine="direct", base_seed=7)

viol = np.array([t["violation"] for t in report.per_trial if t["violation"] is not None])
print(f"N = {report.N}, trials = {report.trials}, infeasible = {report.infeasible_trials}")
print(f"V(x_N): mean {viol.mean():.4f}, max {viol.max():.4f}, eps = {problem.epsilon}")
print(f"failure rate {report.empirical_failure_rate:.3f}  (allowed {problem.delta})")
print()
print(f"J^eps  = {report.j_epsilon}")
print(f"J^eps1 = {report.j_epsilon1}   (eps1 = {report.epsilon1:.5f})")
values = np.array([v for v in report.per_trial_values if v is not None])
print(f"J^N ranges over [{values.min()}, {values.max()}]")
print(f"J^eps <= J^N in {report.lower_sandwich_fraction:.0%} of trials, "
      f"J^N <= J^eps1 in {report.upper_sandwich_fraction:.0%}")
