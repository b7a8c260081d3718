"""Fixed and randomly generated instances used by the experiments and demos."""
from __future__ import annotations

import math

import numpy as np

from .domains import Box, ConvexBody, DomainSpec, LinearConstraint
from .problems import (ChanceProblem, FiniteOmega, ModularConstraint, ModularProgram, make_rng)

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def reference_halfplanes(count: int = 1000) -> list[LinearConstraint]:
    """Deterministic halfplanes: golden-ratio angles, stratified offsets in [10, 60]."""
    cons = []
    for i in range(count):
        theta = 2.0 * math.pi * ((i * GOLDEN) % 1.0)
        b = 10.0 + 50.0 * (((i * 379) % count) + 0.5) / count
        cons.append(LinearConstraint([math.cos(theta), math.sin(theta)], b, label=f"w{i}"))
    return cons


def reference_problem() -> ChanceProblem:
    """Z^2 in [-50, 50]^2, minimize x + y, 1000 equally likely halfplanes, eps 0.2, delta 0.1."""
    body = ConvexBody((), Box.uniform(2, -50, 50))
    model = FiniteOmega.uniform(reference_halfplanes())
    return ChanceProblem(np.array([1.0, 1.0]), body, DomainSpec.integers(2), model, 0.2, 0.1)


def _random_objective(rng: np.random.Generator, d: int) -> np.ndarray:
    while True:
        c = rng.integers(-3, 4, size=d).astype(float)
        if np.any(c):
            return c


def _unit_rows(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    a = rng.standard_normal((m, d))
    return a / np.linalg.norm(a, axis=1, keepdims=True)


def random_lattice_instance(m: int, seed: int, half_width: int = 50):
    """Z^2 box, small-integer objective (so ties happen), m halfplanes all containing the origin.

    Returns ``(objective, body, domain, constraints)``.
    """
    rng = make_rng(seed)
    c = _random_objective(rng, 2)
    a = _unit_rows(rng, m, 2)
    b = rng.uniform(0.2, 1.2, m) * half_width
    cons = [LinearConstraint(a[i], b[i]) for i in range(m)]
    body = ConvexBody((), Box.uniform(2, -half_width, half_width))
    return c, body, DomainSpec.integers(2), cons


def random_mixed_instance(m: int, seed: int):
    """Z x R with the integer part in [-3, 3] and the continuous part in [-10, 10]."""
    rng = make_rng(seed)
    c = _random_objective(rng, 2)
    a = _unit_rows(rng, m, 2)
    b = rng.uniform(0.5, 8.0, m)
    cons = [LinearConstraint(a[i], b[i]) for i in range(m)]
    body = ConvexBody((), Box([-3.0, -10.0], [3.0, 10.0]))
    return c, body, DomainSpec.mixed(1, 1), cons


def small_axiom_instance(m: int, seed: int, objective=(1.0, 1.0)):
    """A few halfplanes on a small Z^2 box; some subsets are infeasible."""
    rng = make_rng(seed)
    a = rng.integers(-3, 4, size=(m, 2)).astype(float)
    a[~a.any(axis=1)] = [1.0, 0.0]
    b = rng.integers(-2, 6, size=m).astype(float)
    cons = [LinearConstraint(a[i], b[i]) for i in range(m)]
    body = ConvexBody((), Box.uniform(2, -4, 4))
    return np.asarray(objective, dtype=float), body, DomainSpec.integers(2), cons


def truncated_modular_program(num_continuous: int = 2, upper: int = 12) -> ModularProgram:
    """The six-congruence modular program cut down to three integers and a few continuous variables.

    Integers ``x1, x2, x3`` in ``[0, upper]`` with ``x1 not in {2, 4, 16} (mod 23)``,
    ``x2 = 0 (mod 2)``, ``x3 = 2 (mod 3)``, ``8x1 + 3x2 + 5x3 = 6 (mod 11)``,
    ``6x1 + 4x2 - 3x3 = 1 (mod 2)`` and ``x1 - x3 != 0 (mod 5)``.  Continuous
    ``x4, x5, ...`` lie in ``[0, 10]`` with objective weights ``100 - i``.
    """
    m = 3
    d = m + num_continuous
    congruences = (
        ModularConstraint((8, 3, 5), 11, (6,)),
        ModularConstraint((6, 4, -3), 2, (1,)),
        ModularConstraint((1, 0, -1), 5, (0,), congruent=False),
        ModularConstraint((1, 0, 0), 23, (2, 4, 16), congruent=False),
        ModularConstraint((0, 1, 0), 2, (0,)),
        ModularConstraint((0, 0, 1), 3, (2,)),
    )
    total = np.zeros(d)
    total[:m] = 1.0
    total[m + 2:] = 1.0
    rows = [LinearConstraint(total, 1000.0)]
    objective = np.array([3.0, 7.0, 4.0] + [100.0 - i for i in range(4, 4 + num_continuous)])
    box = Box([0] * m + [0.0] * num_continuous, [upper] * m + [10.0] * num_continuous)
    return ModularProgram(objective, ConvexBody(rows, box), DomainSpec.mixed(m, num_continuous),
                          congruences)


def random_modular_program(seed: int, max_vars: int = 4, max_modulus: int = 7) -> ModularProgram:
    """Integer program with 1-3 random congruences on random forms, all on a small box.

    Boxes and coefficients are kept small enough that the reformulated problem,
    slacks included, can be enumerated point by point.
    """
    rng = make_rng(seed)
    n = int(rng.integers(1, max_vars + 1))
    box = Box.uniform(n, -2, 2) if n <= 2 else Box.uniform(n, -1, 1)
    rows = []
    if rng.random() < 0.5:
        rows.append(LinearConstraint(rng.integers(-2, 3, size=n).astype(float),
                                     float(rng.integers(0, 4))))
    congruences = []
    for _ in range(int(rng.integers(1, 4))):
        q = int(rng.integers(2, max_modulus + 1))
        if rng.random() < 0.3:
            a = [0] * n
            a[int(rng.integers(n))] = 1
        else:
            a = rng.integers(-2, 3, size=n).tolist()
        k = int(rng.integers(1, q))
        residues = tuple(int(r) for r in rng.choice(q, size=k, replace=False))
        congruences.append(ModularConstraint(tuple(a), q, residues, bool(rng.random() < 0.5)))
    return ModularProgram(np.zeros(n), ConvexBody(rows, box), DomainSpec.integers(n),
                          tuple(congruences))
