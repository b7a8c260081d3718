"""How many scenarios does a domain need?

Prints the sample size for a few domains at eps = 0.2, delta = 0.1, next to
the smallest N at which the union bound over witness sets already drops below
delta.  The gap between the two columns is the price of a closed form.
"""
from shelly import DomainSpec, bound_report, helly_number

domains = {
    "R^3": DomainSpec.reals(3),
    "Z^2": DomainSpec.integers(2),
    "Z x R": DomainSpec.mixed(1, 1),
    "Z^2 x R": DomainSpec.mixed(2, 1),
    "Z^3": DomainSpec.integers(3),
}

print(f"{'domain':10s} {'h':>3s} {'closed form':>12s} {'lemma r=.5':>11s} {'tail min':>9s}")
for name, spec in domains.items():
    h = helly_number(spec)
    rep = bound_report(h, 0.2, 0.1)
    print(f"{name:10s} {h:3d} {rep.n_theorem1:12d} {rep.n_lemma1:11d} {rep.n_tail_minimal:9d}")

# On a 101 x 101 lattice box the finite-set bound wins even though h = 4 < ln(10201).
rep = bound_report(4, 0.2, 0.1, cardinality=101 * 101)
print()
print(f"finite-set bound on [-50,50]^2: {rep.n_la_finite}  (closed form: {rep.n_theorem1})")
print(f"regime flag h > ln|K cap S|: {rep.theorem1_looser}, numbers smaller: {rep.la_finite_smaller}")
