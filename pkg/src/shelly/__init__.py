"""Scenario sampling for chance-constrained programs over generalized domains S.

Sample sizes scale with the S-Helly number of the domain; sampled programs are
solved by enumeration or mixed-integer oracles, optionally through Clarkson's
randomized basis algorithm.
"""
__version__ = "0.1.0"

from .bounds import (BoundReport, binomial_tail, bound_report, lemma1_sample_size,
                     luedtke_ahmed_finite, luedtke_ahmed_lipschitz, minimal_tail_sample_size,
                     theorem1_sample_size, theorem2_epsilon1)
from .domains import (Box, CapacityError, Congruence, ConvexBody, DomainSpec, LinearConstraint,
                      QuadraticConstraint, contains, enumerate_in_box, helly_number,
                      verify_helly_witness)
from .oracles import SubproblemSolution, simplex_lp, solve_enumeration, solve_mixed_linear
from .problems import (ChanceProblem, FiniteOmega, Generative, ModularConstraint, ModularProgram,
                       draw_scenarios, encode_coloring, reformulate_congruences,
                       violation_probability_exact, violation_probability_mc)
from .scenario import ExperimentReport, ScenarioRun, exact_ccp_value, experiment, run_ccp, solve_scp
from .violator import Basis, ViolatorInstance, brute_force_basis, check_axioms, clarkson_basis


__all__ = [
    "Basis",
    "BoundReport",
    "Box",
    "CapacityError",
    "ChanceProblem",
    "Congruence",
    "ConvexBody",
    "DomainSpec",
    "ExperimentReport",
    "FiniteOmega",
    "Generative",
    "LinearConstraint",
    "ModularConstraint",
    "ModularProgram",
    "QuadraticConstraint",
    "ScenarioRun",
    "SubproblemSolution",
    "ViolatorInstance",
    "binomial_tail",
    "bound_report",
    "brute_force_basis",
    "check_axioms",
    "clarkson_basis",
    "contains",
    "draw_scenarios",
    "encode_coloring",
    "enumerate_in_box",
    "exact_ccp_value",
    "experiment",
    "helly_number",
    "lemma1_sample_size",
    "luedtke_ahmed_finite",
    "luedtke_ahmed_lipschitz",
    "minimal_tail_sample_size",
    "reformulate_congruences",
    "run_ccp",
    "simplex_lp",
    "solve_enumeration",
    "solve_mixed_linear",
    "solve_scp",
    "theorem1_sample_size",
    "theorem2_epsilon1",
    "verify_helly_witness",
    "violation_probability_exact",
    "violation_probability_mc",
]
