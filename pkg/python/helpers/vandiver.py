"""Vandiver certification by p-th power obstructions of cyclotomic units in F_q."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

import sympy

from python.helpers.errors import ParameterError
from python.helpers.irregular import check_odd_prime, irregular_indices


class VandiverStatus(str, Enum):
    HOLDS = "HOLDS"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Witness:
    q: int
    certified: bool


@dataclass
class VandiverOutcome:
    p: int
    k: int
    witnesses: list[Witness] = field(default_factory=list)

    @property
    def status(self) -> VandiverStatus:
        if any(w.certified for w in self.witnesses):
            return VandiverStatus.HOLDS
        return VandiverStatus.INCONCLUSIVE


def witness_primes(p: int) -> Iterator[int]:
    """Primes q = 2mp + 1, m = 1, 2, ... in increasing order."""
    m = 1
    while True:
        q = 2 * m * p + 1
        if sympy.isprime(q):
            yield q
        m += 1


def primitive_pth_root(p: int, q: int, t: int = 1) -> int:
    """zeta^t where zeta = h^((q-1)/p) for the least h >= 2 giving zeta != 1."""
    e = (q - 1) // p
    h = 2
    while pow(h, e, q) == 1:
        h += 1
    return pow(pow(h, e, q), t, q)


def unit_obstruction(p: int, k: int, q: int, t: int = 1) -> int:
    """u^((q-1)/p) in F_q for the test unit u attached to the eigenspace k.

    u = prod_{a <= (p-1)/2} (s^-a - s^a)^(a^(p-1-k) mod p) with s^2 = zeta, the
    real cyclotomic unit factor, which is (1 - zeta^a) up to a root of unity.
    """
    zeta = primitive_pth_root(p, q, t)
    s = pow(zeta, (p + 1) // 2, q)
    s_inv = pow(s, -1, q)
    u = 1
    left, right = 1, 1
    for a in range(1, (p - 1) // 2 + 1):
        left = left * s_inv % q
        right = right * s % q
        eta = (left - right) % q
        u = u * pow(eta, pow(a, p - 1 - k, p), q) % q
    return pow(u, (q - 1) // p, q)


def vandiver_test(p: int, k: int, q: int, t: int = 1) -> bool:
    """True when the test unit is not a p-th power in F_q, which certifies Vandiver at (p, k)."""
    check_odd_prime(p)
    if q % p != 1 or not sympy.isprime(q):
        raise ParameterError(f"witness {q} must be a prime congruent to 1 mod {p}")
    if k % 2 or not 2 <= k <= p - 3:
        raise ParameterError(f"{k} is not an even index in [2, {p - 3}]")
    if t % p == 0:
        raise ParameterError(f"root exponent {t} must be prime to {p}")
    return unit_obstruction(p, k, q, t) != 1


def vandiver_outcome(p: int, k: int, budget: int = 8) -> VandiverOutcome:
    outcome = VandiverOutcome(p, k)
    for index, q in enumerate(witness_primes(p)):
        if index >= budget:
            break
        certified = vandiver_test(p, k, q)
        outcome.witnesses.append(Witness(q, certified))
        if certified:
            break
    return outcome


def vandiver_status(p: int, budget: int = 8) -> list[VandiverOutcome]:
    return [vandiver_outcome(p, k, budget) for k in irregular_indices(p).indices]
