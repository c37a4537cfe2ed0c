"""Bernoulli numbers modulo p^N, irregular indices and regular-prime counts."""

import threading
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
import sympy

from python.helpers.errors import NonIntegralBernoulliError, ParameterError
from python.helpers.modarith import ResidueRing, bigrational_bernoulli, reduce_fraction

# int64 is safe for the power sums below this bound: p^3 < 2^63
_INT64_PRIME_LIMIT = 2_000_000

_MOD_TABLES: dict[tuple[int, int], list[int]] = {}
_MOD_TABLES_LOCK = threading.Lock()


@dataclass(frozen=True)
class IrregularityRecord:
    p: int
    indices: tuple[int, ...] = ()

    @property
    def index_of_irregularity(self) -> int:
        return len(self.indices)

    @property
    def regular(self) -> bool:
        return not self.indices


@dataclass
class RegularScan:
    regular_count: int
    total: int
    fraction: float
    irregular_primes: list[int] = field(default_factory=list)
    index_histogram: dict[int, int] = field(default_factory=dict)


def check_odd_prime(p: int):
    if p < 3 or not sympy.isprime(p):
        raise ParameterError(f"{p} is not an odd prime")


def _bernoulli_prefix_mod(p: int, N: int, upto: int) -> list[int]:
    """B_0..B_upto mod p^N by the defining recursion; needs upto <= p - 3."""
    table = _MOD_TABLES.get((p, N))
    if table is not None and len(table) > upto:
        return table
    ring = ResidueRing(p, N)
    mod = ring.modulus
    with _MOD_TABLES_LOCK:
        table = _MOD_TABLES.setdefault((p, N), [1, ring.reduce(-ring.inverse(2))])
        while len(table) <= upto:
            m = len(table)
            if m % 2:
                table.append(0)
                continue
            total = table[0] + (m + 1) * table[1]
            for j in range(2, m, 2):
                total += comb(m + 1, j) * table[j]
            table.append(-total * ring.inverse(m + 1) % mod)
    return table


def bernoulli_mod(p: int, N: int, m: int) -> int:
    """B_m mod p^N for p-integral B_m."""
    check_odd_prime(p)
    if m < 0:
        raise ParameterError(f"Bernoulli index must be non-negative, got {m}")
    if m > 0 and m % (p - 1) == 0:
        raise NonIntegralBernoulliError(
            f"B_{m} is not {p}-integral: {p - 1} divides {m}"
        )
    if m <= p - 3:
        return _bernoulli_prefix_mod(p, N, m)[m]
    return reduce_fraction(bigrational_bernoulli(m), ResidueRing(p, N))


def kummer_value(p: int, m: int, N: int = 1) -> int:
    """(1 - p^(m-1)) B_m / m mod p^N, the quantity fixed by Kummer's congruences."""
    if m < 2 or m % (p - 1) == 0:
        raise NonIntegralBernoulliError(f"B_{m}/{m} is not {p}-integral")
    ring = ResidueRing(p, N)
    value = (1 - Fraction(p) ** (m - 1)) * bigrational_bernoulli(m) / m
    return reduce_fraction(value, ring)


def _voronoi_weights(p: int) -> tuple[int, np.ndarray, np.ndarray]:
    c = int(sympy.primitive_root(p))
    dtype = np.int64 if p < _INT64_PRIME_LIMIT else object
    b = np.arange(1, p, dtype=dtype)
    return c, b, (c * b) // p


def voronoi_sum(p: int, k: int) -> int:
    """sum_b b^(k-1) floor(c b / p) mod p; vanishes exactly when p | B_k (2 <= k <= p-3)."""
    c, b, floors = _voronoi_weights(p)
    powers = np.array([pow(int(x), k - 1, p) for x in b], dtype=b.dtype)
    return int((powers * floors).sum() % p)


def is_irregular_pair(p: int, k: int) -> bool:
    check_odd_prime(p)
    if k % 2 or not 2 <= k <= p - 3:
        return False
    return voronoi_sum(p, k) == 0


def irregular_indices(p: int) -> IrregularityRecord:
    """All even k in [2, p-3] with p | B_k.

    Uses Voronoi's congruence (c^k - 1) B_k / k = c^(k-1) sum_b b^(k-1) floor(cb/p)
    mod p with c a primitive root, evaluated for every k with one vector pass.
    """
    check_odd_prime(p)
    if p < 7:
        return IrregularityRecord(p)
    c, b, floors = _voronoi_weights(p)
    step = b * b % p
    powers = b.copy()
    found = []
    for k in range(2, p - 2, 2):
        if int((powers * floors).sum() % p) == 0:
            found.append(k)
        powers = powers * step % p
    return IrregularityRecord(p, tuple(found))


def irregular_indices_by_recursion(p: int) -> IrregularityRecord:
    """Reference path through bernoulli_mod; O(p^2) ring operations."""
    check_odd_prime(p)
    table = _bernoulli_prefix_mod(p, 1, max(p - 3, 1))
    return IrregularityRecord(
        p, tuple(k for k in range(2, p - 2, 2) if table[k] == 0)
    )


def scan_regular_fraction(P_max: int) -> RegularScan:
    if P_max < 37:
        raise ParameterError(f"scan bound must be at least 37, got {P_max}")
    histogram: Counter[int] = Counter()
    irregular = []
    total = 0
    for p in sympy.primerange(3, P_max + 1):
        total += 1
        record = irregular_indices(int(p))
        histogram[record.index_of_irregularity] += 1
        if not record.regular:
            irregular.append(int(p))
    regular_count = histogram[0]
    return RegularScan(
        regular_count=regular_count,
        total=total,
        fraction=regular_count / total,
        irregular_primes=irregular,
        index_histogram=dict(sorted(histogram.items())),
    )
