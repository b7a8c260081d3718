import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shelly.bounds import (binomial_tail, bound_report, lemma1_sample_size, log_binomial_tail,
                           luedtke_ahmed_finite, luedtke_ahmed_lipschitz,
                           minimal_tail_sample_size, theorem1_sample_size, theorem2_epsilon1)

H_GRID = range(1, 9)
EPS_GRID = (0.05, 0.1, 0.2, 0.5, 1.0)
DELTA_GRID = (0.01, 0.05, 0.1, 0.3)
R_GRID = (0.1, 0.5, 0.9)


def exact_tail(N, h, eps):
    """C(N, h) (1 - eps)^(N - h) with the binomial as a big integer and eps as a rational."""
    return math.comb(N, h) * (1 - Fraction(eps)) ** (N - h)


class TestTheorem1:
    def test_spot_values(self):
        # 60 ln 10 + 20 ln 100 + 6 = 236.26...
        assert theorem1_sample_size(4, 0.1, 0.01) == 237
        assert theorem1_sample_size(4, 0.2, 0.1) == 78
        assert theorem1_sample_size(4, 1.0, 0.5) == 8
        assert theorem1_sample_size(1, 0.5, 0.5) == 3

    def test_h1_keeps_only_delta_term(self):
        assert theorem1_sample_size(1, 0.1, 0.01) == math.ceil(20 * math.log(100))

    @pytest.mark.parametrize("h", H_GRID)
    def test_monotone(self, h):
        for e1, e2 in zip(EPS_GRID, EPS_GRID[1:]):
            assert theorem1_sample_size(h, e1, 0.1) >= theorem1_sample_size(h, e2, 0.1)
        for d1, d2 in zip(DELTA_GRID, DELTA_GRID[1:]):
            assert theorem1_sample_size(h, 0.1, d1) >= theorem1_sample_size(h, 0.1, d2)
        assert theorem1_sample_size(h + 1, 0.1, 0.1) >= theorem1_sample_size(h, 0.1, 0.1)

    def test_sound_on_grid(self):
        for h in range(2, 9):
            for eps in EPS_GRID:
                for delta in DELTA_GRID:
                    N = theorem1_sample_size(h, eps, delta)
                    assert binomial_tail(N, h - 1, eps) <= delta

    @pytest.mark.parametrize("bad", [(4, 0.0, 0.1), (4, 1.5, 0.1), (4, 0.1, 0.0),
                                     (4, 0.1, 1.0), (0, 0.1, 0.1), (2.5, 0.1, 0.1)])
    def test_domain_errors(self, bad):
        with pytest.raises(ValueError):
            theorem1_sample_size(*bad)


class TestLemma1:
    def test_sound_on_full_grid(self):
        for h in H_GRID:
            for eps in EPS_GRID:
                for delta in DELTA_GRID:
                    for r in R_GRID:
                        N = lemma1_sample_size(h, eps, delta, r)
                        assert binomial_tail(N, h, eps) <= delta, (h, eps, delta, r)

    def test_example_h3(self):
        N = lemma1_sample_size(3, 0.1, 0.05, 0.5)
        assert binomial_tail(N, 3, 0.1) <= 0.05

    def test_never_below_minimum(self):
        for h in H_GRID:
            for eps in EPS_GRID:
                for r in R_GRID:
                    assert minimal_tail_sample_size(h, eps, 0.05) <= lemma1_sample_size(h, eps, 0.05, r)

    def test_bad_r(self):
        with pytest.raises(ValueError):
            lemma1_sample_size(2, 0.1, 0.1, 1.0)

    @given(st.integers(0, 12), st.floats(0.01, 1.0), st.floats(0.001, 0.99), st.floats(0.05, 0.95))
    def test_sound_random(self, h, eps, delta, r):
        N = lemma1_sample_size(h, eps, delta, r)
        assert log_binomial_tail(N, h, eps) <= math.log(delta) + 1e-12


class TestBinomialTail:
    def test_geometric(self):
        assert binomial_tail(10, 0, 0.5) == pytest.approx(0.5**10, rel=1e-14)

    def test_n_equals_h(self):
        assert binomial_tail(7, 7, 0.3) == 1.0

    def test_eps_one(self):
        assert binomial_tail(5, 2, 1.0) == 0.0

    def test_against_big_integers(self):
        worst = 0.0
        for N in range(0, 201):
            for h in range(0, min(N, 12) + 1):
                for eps in (0.05, 0.2, 0.5):
                    exact = exact_tail(N, h, eps)
                    if exact == 0:
                        continue
                    got = binomial_tail(N, h, eps)
                    worst = max(worst, abs(Fraction(got) - exact) / exact)
        assert worst <= 1e-10

    def test_spot_value(self):
        assert binomial_tail(100, 3, 0.2) == pytest.approx(float(exact_tail(100, 3, 0.2)), rel=1e-12)

    def test_no_overflow(self):
        assert 0.0 < binomial_tail(5000, 40, 0.05) < 1.0

    def test_precondition(self):
        with pytest.raises(ValueError):
            binomial_tail(2, 3, 0.5)


class TestMinimalTail:
    def test_h0(self):
        assert minimal_tail_sample_size(0, 0.5, 0.25) == 2

    def test_is_smallest(self):
        for h in range(0, 6):
            for eps in EPS_GRID[:-1]:
                for delta in DELTA_GRID:
                    N = minimal_tail_sample_size(h, eps, delta)
                    assert binomial_tail(N, h, eps) <= delta
                    # every smaller N >= h fails: the passing set is an up-set
                    assert all(binomial_tail(n, h, eps) > delta for n in range(h, N))

    def test_below_theorem1_with_shifted_h(self):
        for h in range(0, 8):
            for eps in EPS_GRID:
                for delta in DELTA_GRID:
                    assert minimal_tail_sample_size(h, eps, delta) <= theorem1_sample_size(h + 1, eps, delta)


class TestEpsilon1:
    def test_values(self):
        assert theorem2_epsilon1(0.3, 1) == pytest.approx(0.3, abs=1e-15)
        assert theorem2_epsilon1(0.19, 2) == pytest.approx(0.1, abs=1e-15)

    def test_roundtrip(self):
        e1 = theorem2_epsilon1(0.1, 78)
        assert (1 - e1) ** 78 == pytest.approx(0.9, abs=1e-12)

    @given(st.floats(1e-6, 0.999), st.integers(1, 10**6))
    def test_range(self, delta, N):
        e1 = theorem2_epsilon1(delta, N)
        assert 0.0 < e1 <= delta * (1 + 1e-12)


class TestComparisonBounds:
    def test_finite(self):
        assert luedtke_ahmed_finite(1, 0.5, 0.5) == 2
        assert luedtke_ahmed_finite(10201, 0.2, 0.1) == 58

    def test_lipschitz(self):
        assert luedtke_ahmed_lipschitz(1, 1.0, 1.0, 2.0, 1.0, math.exp(-1)) == 6

    def test_lipschitz_large_gamma_floor(self):
        small = luedtke_ahmed_lipschitz(3, 1.0, 1.0, 1e9, 0.5, 0.1)
        expected = math.ceil(4 * math.log(10) + 12 * 1 + 4 * math.log(4))
        assert small == expected

    def test_lipschitz_monotone_in_n(self):
        vals = [luedtke_ahmed_lipschitz(n, 2.0, 3.0, 0.5, 0.2, 0.1) for n in range(1, 10)]
        assert vals == sorted(vals)

    def test_report(self):
        rep = bound_report(4, 0.2, 0.1, cardinality=10201, lipschitz=(1, 1.0, 1.0, 2.0))
        assert rep.n_theorem1 == 78
        assert rep.n_la_finite == 58
        assert rep.theorem1_looser is False  # 4 < ln 10201
        assert rep.la_finite_smaller is True
        assert rep.n_lemma1 >= rep.n_tail_minimal >= 1
        assert set(rep.to_dict()) >= {"n_theorem1", "n_lemma1", "n_tail_minimal",
                                      "n_la_finite", "n_la_lipschitz"}

    def test_regime_flag_implies_smaller(self):
        for h in H_GRID:
            for card in (1, 2, 5, 20, 100, 3000):
                for eps in EPS_GRID:
                    for delta in DELTA_GRID:
                        rep = bound_report(h, eps, delta, cardinality=card)
                        assert rep.theorem1_looser == (h > math.log(card))
                        if rep.theorem1_looser:
                            assert rep.n_la_finite <= rep.n_theorem1
