"""Coloring and congruences as lattices with sublattices removed."""
import numpy as np

from shelly import contains, helly_number
from shelly.instances import truncated_modular_program
from shelly.problems import find_coloring, reformulate_congruences

petersen = [(i, (i + 1) % 5) for i in range(5)] + [(i, i + 5) for i in range(5)] \
    + [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
for k in (2, 3):
    print(f"Petersen graph, {k} colors:", find_coloring(petersen, 10, k) or "none")

prog = truncated_modular_program()
lifted = reformulate_congruences(prog)
m = prog.domain.num_integer
print()
print(f"{prog.domain.dimension} variables -> {lifted.dimension} after adding "
      f"{len(prog.slack_forms)} slacks")
for j, form in enumerate(prog.slack_forms):
    kept = sorted(set(range(form.q)) - set(form.excluded_residues))
    print(f"  y{j + 1} = {form.a} . x   allowed residues mod {form.q}: {kept}")

# brute force over the original integers, then check the lifted point
best = None
for z in np.ndindex(13, 13, 13):
    x = np.array(z + (0.0, 0.0))
    if prog.feasible(x) and (best is None or prog.objective @ x < prog.objective @ best):
        best = x
y = prog.lift(best)
print(f"cheapest feasible point {best[:m].astype(int)}, lifted {y[:lifted.domain.num_integer].astype(int)}")
print("lifted point in S:", contains(lifted.domain, y), " in K:", lifted.deterministic_set.contains(y))
# no closed form here; scenario runs on this domain need helly_override
print("Helly number of the lifted domain:", helly_number(lifted.domain))
