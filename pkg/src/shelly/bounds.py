"""Sample-size bounds for scenario programs over a domain with Helly number h.

All arithmetic on binomial terms happens in log space; the ceiling is taken
once, at the end of each formula.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass


def _check_eps(epsilon: float) -> None:
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must satisfy 0 < epsilon <= 1, got {epsilon}")


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must satisfy 0 < delta < 1, got {delta}")


def _check_h(h: int, minimum: int = 1) -> None:
    if int(h) != h or h < minimum:
        raise ValueError(f"h must be an integer >= {minimum}, got {h}")


def _log_inv(x: float) -> float:
    """ln(1/x), exactly zero at x = 1."""
    return 0.0 if x == 1.0 else -math.log(x)


def _ceil(x: float) -> int:
    return math.ceil(x)


def theorem1_sample_size(h: int, epsilon: float, delta: float) -> int:
    """Scenarios needed so that P[V(x_N) > epsilon] < delta when S has Helly number h.

    ``N >= 2(h-1)/eps ln(1/eps) + 2/eps ln(1/delta) + 2(h-1)``.  At ``h = 1``
    only the middle term survives.
    """
    _check_h(h)
    _check_eps(epsilon)
    _check_delta(delta)
    k = h - 1
    n = (2.0 * k / epsilon) * _log_inv(epsilon) + (2.0 / epsilon) * _log_inv(delta) + 2.0 * k
    return max(1, _ceil(n))


def lemma1_sample_size(h: int, epsilon: float, delta: float, r: float = 0.5) -> int:
    """Parametrized bound guaranteeing ``C(N, h) (1 - eps)^(N - h) <= delta``.

    ``N >= 1/(1-r) * [ (1/eps) ln(1/delta) + h + (h/eps) ln(1/(r eps))
                       + (1/eps) ln((h/eps)^h / h!) ]``

    ``h = 0`` is accepted and reduces to the geometric case.
    """
    _check_h(h, minimum=0)
    _check_eps(epsilon)
    _check_delta(delta)
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must satisfy 0 < r < 1, got {r}")
    log_last = h * math.log(h / epsilon) - math.lgamma(h + 1) if h else 0.0
    inner = ((1.0 / epsilon) * _log_inv(delta)
             + h
             + (h / epsilon) * _log_inv(r * epsilon)
             + (1.0 / epsilon) * log_last)
    return max(1, _ceil(inner / (1.0 - r)))


def log_binomial_tail(N: int, h: int, epsilon: float) -> float:
    """``ln( C(N, h) (1 - eps)^(N - h) )``; ``-inf`` when the term is zero."""
    if h < 0 or N < h:
        raise ValueError(f"need N >= h >= 0, got N={N}, h={h}")
    _check_eps(epsilon)
    if N == h:
        return 0.0
    if epsilon == 1.0:
        return -math.inf
    log_c = math.lgamma(N + 1) - math.lgamma(h + 1) - math.lgamma(N - h + 1)
    return log_c + (N - h) * math.log1p(-epsilon)


def binomial_tail(N: int, h: int, epsilon: float) -> float:
    """``C(N, h) (1 - eps)^(N - h)``, the union bound over witness sets of size h."""
    return math.exp(log_binomial_tail(N, h, epsilon))


def minimal_tail_sample_size(h: int, epsilon: float, delta: float) -> int:
    """Smallest ``N >= h`` with ``binomial_tail(N, h, eps) <= delta``.

    For N >= h the tail rises and then falls (the ratio of consecutive terms
    decreases in N), and it equals 1 at N = h, so ``{N : tail <= delta}`` is an
    up-set and bisection applies.
    """
    _check_h(h, minimum=0)
    _check_eps(epsilon)
    _check_delta(delta)
    log_delta = math.log(delta)

    def ok(n: int) -> bool:
        return log_binomial_tail(n, h, epsilon) <= log_delta

    hi = max(h + 1, math.ceil(h / epsilon))
    while not ok(hi):
        hi *= 2
    lo = h  # tail(h) = 1 > delta
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    # the last term may sit on a rounding edge; confirm locally
    for n in range(max(h, hi - 2), hi + 3):
        if ok(n):
            return n
    return hi


def theorem2_epsilon1(delta: float, N: int) -> float:
    """``1 - (1 - delta)^(1/N)``: the level whose optimum J^N stays below w.p. 1 - delta."""
    _check_delta(delta)
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    return -math.expm1(math.log1p(-delta) / N)


def luedtke_ahmed_finite(cardinality: int, epsilon: float, delta: float) -> int:
    """Sample size for finite ``K cap S``: ``(1/eps) ln(1/delta) + (1/eps) ln|K cap S|``."""
    if int(cardinality) != cardinality or cardinality < 1:
        raise ValueError(f"cardinality must be a positive integer, got {cardinality}")
    _check_eps(epsilon)
    _check_delta(delta)
    n = (1.0 / epsilon) * _log_inv(delta) + (1.0 / epsilon) * math.log(cardinality)
    return max(1, _ceil(n))


def luedtke_ahmed_lipschitz(n: int, L: float, D: float, gamma: float,
                            epsilon: float, delta: float) -> int:
    """Lipschitz-f sample size for mixed-integer problems.

    ``(2/eps) ln(1/delta) + (2n/eps) ceil(2LD/gamma) + (2/eps) ln ceil(2/eps)``.

    The guarantee only covers points satisfying every sampled constraint with
    margin, ``f(x, w^i) <= -gamma``; it says nothing about boundary points such
    as the sampled optimum.
    """
    if n <= 0 or L <= 0 or D <= 0 or gamma <= 0:
        raise ValueError("n, L, D and gamma must be positive")
    _check_eps(epsilon)
    _check_delta(delta)
    grid = max(1, math.ceil(2.0 * L * D / gamma))
    value = ((2.0 / epsilon) * _log_inv(delta)
             + (2.0 * n / epsilon) * grid
             + (2.0 / epsilon) * math.log(math.ceil(2.0 / epsilon)))
    return max(1, _ceil(value))


@dataclass(frozen=True)
class BoundReport:
    h: int
    epsilon: float
    delta: float
    r: float
    n_theorem1: int
    n_lemma1: int
    n_tail_minimal: int
    n_la_finite: int | None = None
    theorem1_looser: bool | None = None
    la_finite_smaller: bool | None = None
    n_la_lipschitz: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def bound_report(h: int, epsilon: float, delta: float, r: float = 0.5,
                 cardinality: int | None = None,
                 lipschitz: tuple[int, float, float, float] | None = None) -> BoundReport:
    """All sample sizes for one parameter set.

    ``n_lemma1`` and ``n_tail_minimal`` use ``h(S) - 1`` (the witness-set size)
    so the three leading columns are directly comparable.

    ``theorem1_looser`` flags the regime ``h > ln|K cap S|`` in which the
    finite-set bound is guaranteed to be the better one.  The condition is
    sufficient, not necessary; ``la_finite_smaller`` records the actual
    comparison of the two integers.
    """
    n1 = theorem1_sample_size(h, epsilon, delta)
    k = h - 1
    n_lemma = lemma1_sample_size(k, epsilon, delta, r)
    n_min = minimal_tail_sample_size(k, epsilon, delta)
    la_n = looser = smaller = None
    if cardinality is not None:
        la_n = luedtke_ahmed_finite(cardinality, epsilon, delta)
        looser = h > math.log(cardinality)
        smaller = la_n < n1
    lip = luedtke_ahmed_lipschitz(*lipschitz, epsilon, delta) if lipschitz is not None else None
    return BoundReport(h, epsilon, delta, r, n1, n_lemma, n_min, la_n, looser, smaller, lip)
