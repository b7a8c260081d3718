"""Primitive-test counts of Clarkson's algorithm as the constraint count grows.

The expected count is linear in m; the ratio column should stay roughly flat.
"""
import numpy as np

from shelly.instances import random_lattice_instance
from shelly.violator import ViolatorInstance, clarkson_basis

for m in (100, 200, 400, 800):
    calls = []
    for seed in range(20):
        inst = ViolatorInstance(*random_lattice_instance(m, seed))
        basis = clarkson_basis(inst, seed)
        full = inst.oracle.solve(range(m))
        assert np.array_equal(basis.solution.point, full.point)
        calls.append(basis.stats.primitive_calls)
    print(f"m={m:4d}  mean primitive tests {np.mean(calls):8.1f}  per constraint {np.mean(calls) / m:.2f}")
