"""Exact distribution of correct matches under random-permutation linkage.

Linking two same-size files by a uniformly random permutation matches
exactly r records with probability

    P(r) = (1/r!) * sum_{v=0}^{n-r} (-1)^v / v!

which is the fixed-point distribution of a uniform random permutation.
Internally everything is integer arithmetic: the number of permutations
of n elements with exactly r fixed points is C(n, r) * D(n-r), where
D(k) is the derangement count D(k) = k*D(k-1) + (-1)^k.  Floats appear
only at the API boundary, so no factorial ratio ever underflows.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

from .errors import CapacityError

# pmf_table is O(n) big-int operations per entry; 10k keeps it desk-scale.
DEFAULT_TABLE_CAP = 10_000


def _derangements(n: int) -> list[int]:
    """D(0..n) via D(k) = k*D(k-1) + (-1)^k."""
    d = [1] * (n + 1)
    for k in range(1, n + 1):
        d[k] = k * d[k - 1] + (-1 if k % 2 else 1)
    return d


def fixed_point_count(n: int, r: int) -> int:
    """Number of permutations of n elements with exactly r fixed points."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if r < 0 or r > n:
        raise ValueError(f"r must be in [0, {n}], got {r}")
    return comb(n, r) * _derangements(n - r)[n - r]


def exact_match_fraction(n: int, r: int) -> Fraction:
    """P(exactly r correct matches) as an exact rational."""
    return Fraction(fixed_point_count(n, r), factorial(n))


def exact_match_pmf(n: int, r: int) -> float:
    """P(exactly r correct matches) under a uniform random permutation."""
    # int/int division is correctly rounded even when both exceed float range
    return fixed_point_count(n, r) / factorial(n)


class MatchPmf:
    """Full fixed-point pmf for file size n; probs[r] = P(exactly r matches)."""

    def __init__(self, n: int, probs: tuple[float, ...]):
        if len(probs) != n + 1:
            raise ValueError("probs must have n+1 entries")
        total = sum(probs)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probs sum to {total!r}, expected 1")
        if n >= 2 and probs[n - 1] != 0.0:
            raise ValueError("P(n-1) must be 0: a permutation cannot fix exactly n-1 points")
        self.n = n
        self.probs = probs

    def __iter__(self):
        return iter(self.probs)

    def __getitem__(self, r: int) -> float:
        return self.probs[r]


def pmf_table(n: int, cap: int = DEFAULT_TABLE_CAP) -> MatchPmf:
    """Full pmf vector for file size n (n <= cap)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > cap:
        raise CapacityError(f"n={n} exceeds the table cap of {cap}")
    dgs = _derangements(n)
    nfact = factorial(n)
    probs = tuple(comb(n, r) * dgs[n - r] / nfact for r in range(n + 1))
    return MatchPmf(n, probs)


def exact_match_moments(n: int) -> tuple[float, float]:
    """(mean, variance) of the fixed-point count, computed from the exact pmf.

    Linearity of expectation forces mean 1 for every n; the variance is 1
    for n >= 2 and 0 for n = 1.  Both are computed by exact summation and
    only then converted to float.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    dgs = _derangements(n)
    nfact = factorial(n)
    mean = Fraction(0)
    second = Fraction(0)
    for r in range(n + 1):
        p = Fraction(comb(n, r) * dgs[n - r], nfact)
        mean += r * p
        second += r * r * p
    var = second - mean * mean
    return float(mean), float(var)
