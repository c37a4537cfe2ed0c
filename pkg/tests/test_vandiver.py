from itertools import islice

import pytest
import sympy

from python.helpers.errors import ParameterError
from python.helpers.irregular import irregular_indices
from python.helpers.vandiver import (
    VandiverStatus,
    Witness,
    primitive_pth_root,
    unit_obstruction,
    vandiver_outcome,
    vandiver_status,
    vandiver_test,
    witness_primes,
)


def test_witness_primes_for_37():
    assert list(islice(witness_primes(37), 3)) == [149, 223, 593]


def test_witness_primes_are_one_mod_p():
    for q in islice(witness_primes(59), 10):
        assert sympy.isprime(q)
        assert q % 59 == 1


def test_primitive_pth_root_has_order_p():
    for q in islice(witness_primes(37), 4):
        zeta = primitive_pth_root(37, q)
        assert zeta != 1
        assert pow(zeta, 37, q) == 1
        assert primitive_pth_root(37, q, 5) == pow(zeta, 5, q)


def test_obstruction_is_a_pth_root_of_unity():
    for q in islice(witness_primes(37), 3):
        assert pow(unit_obstruction(37, 32, q), 37, q) == 1


def test_first_witness_certifies_37():
    outcome = vandiver_outcome(37, 32)
    assert outcome.witnesses[0] == Witness(149, True)
    assert len(outcome.witnesses) == 1
    assert outcome.status is VandiverStatus.HOLDS


def test_zero_budget_is_inconclusive():
    outcome = vandiver_outcome(37, 32, budget=0)
    assert outcome.witnesses == []
    assert outcome.status is VandiverStatus.INCONCLUSIVE


@pytest.mark.parametrize(
    "p, k, q, t",
    [
        (37, 32, 150, 1),
        (37, 32, 151, 1),
        (37, 31, 149, 1),
        (37, 36, 149, 1),
        (37, 32, 149, 37),
        (35, 32, 71, 1),
    ],
)
def test_vandiver_test_rejects_bad_arguments(p, k, q, t):
    with pytest.raises(ParameterError):
        vandiver_test(p, k, q, t)


def test_vandiver_status_covers_every_index():
    assert vandiver_status(7) == []
    outcomes = vandiver_status(157)
    assert [o.k for o in outcomes] == [62, 110]
    assert all(o.status is VandiverStatus.HOLDS for o in outcomes)


@pytest.mark.slow
def test_witness_budget_suffices_below_400():
    for p in sympy.primerange(3, 400):
        for k in irregular_indices(int(p)).indices:
            assert vandiver_outcome(int(p), k, budget=8).status is VandiverStatus.HOLDS


def test_vandiver_status_for_149():
    outcomes = vandiver_status(149)
    assert [(o.p, o.k) for o in outcomes] == [(149, 130)]
    assert outcomes[0].status is VandiverStatus.HOLDS


def irregular_pairs_below(bound: int) -> list[tuple[int, int]]:
    return [
        (int(p), k)
        for p in sympy.primerange(3, bound)
        for k in irregular_indices(int(p)).indices
    ]


@pytest.mark.parametrize("t", [2, 3, 5, 7, 11])
def test_obstruction_does_not_depend_on_the_chosen_root(t):
    for p, k in irregular_pairs_below(200):
        for q in islice(witness_primes(p), 4):
            assert vandiver_test(p, k, q, t) == vandiver_test(p, k, q), (p, k, q)


def obstruction_with_exponents(p: int, q: int, exponents: list[int]) -> int:
    """The test unit built from explicit exponents c_a, a = 1..(p-1)/2."""
    s = pow(primitive_pth_root(p, q), (p + 1) // 2, q)
    u = 1
    for a, c in enumerate(exponents, start=1):
        eta = (pow(s, -a, q) - pow(s, a, q)) % q
        u = u * pow(eta, c, q) % q
    return pow(u, (q - 1) // p, q)


def test_exponents_only_matter_mod_p():
    p, k = 37, 32
    exponents = [pow(a, p - 1 - k, p) for a in range(1, (p - 1) // 2 + 1)]
    for q in islice(witness_primes(p), 4):
        assert obstruction_with_exponents(p, q, exponents) == unit_obstruction(p, k, q)
        shifted = [c + p * (1 + a % 3) for a, c in enumerate(exponents)]
        assert obstruction_with_exponents(p, q, shifted) == unit_obstruction(p, k, q)
