import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import product

import pytest
import sympy

from python.helpers import modarith
from python.helpers.errors import NonUnitDivisionError, ParameterError, RingMismatchError
from python.helpers.modarith import (
    ResidueRing,
    TruncatedSeries,
    bigrational_bernoulli,
    howell_form,
    monomials,
    multiplication_matrix,
    nu_ratio_series,
    nu_series,
    omega_series,
    preimage,
    quotient_invariants,
    reduce_fraction,
    row_kernel,
    series_eval,
    series_from_terms,
    series_inverse,
    series_mul,
    series_pow,
    series_variable,
    smith_form,
    span_size_log,
)


def brute_span_size(rows, modulus, cols):
    seen = {(0,) * cols}
    frontier = list(seen)
    gens = [tuple(x % modulus for x in row) for row in rows]
    while frontier:
        v = frontier.pop()
        for g in gens:
            w = tuple((a + b) % modulus for a, b in zip(v, g))
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return len(seen)


@pytest.mark.parametrize("p, N", [(2, 1), (9, 2), (5, 0), (1, 3)])
def test_residue_ring_rejects_bad_parameters(p, N):
    with pytest.raises(ParameterError):
        ResidueRing(p, N)


def test_residue_ring_arithmetic():
    ring = ResidueRing(3, 4)
    assert ring.modulus == 81
    assert ring.valuation(18) == 2
    assert ring.valuation(0) == 4
    assert ring.valuation(81 + 5) == 0
    assert ring.inverse(2) * 2 % 81 == 1
    assert ring.divide(4, 2) == 2
    assert ring.lift(6).modulus == 729
    with pytest.raises(NonUnitDivisionError):
        ring.inverse(6)


def test_monomials_are_graded():
    assert monomials(2, 3) == ((0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0))
    assert len(monomials(3, 4)) == sympy.binomial(6, 3)


def test_series_inverse_of_one_plus_t():
    ring = ResidueRing(3, 3)
    f = series_from_terms(ring, 1, 5, [[1, 0], [1, 1]])
    inv = series_inverse(f)
    assert [inv.coefficient((j,)) for j in range(5)] == [1, 26, 1, 26, 1]
    assert series_mul(f, inv) == series_from_terms(ring, 1, 5, [[1, 0]])


def test_series_inverse_needs_a_unit():
    ring = ResidueRing(5, 2)
    with pytest.raises(NonUnitDivisionError):
        series_inverse(series_variable(ring, 1, 4, 0))


def test_series_truncates_at_degree_cap():
    ring = ResidueRing(5, 2)
    T1 = series_variable(ring, 2, 3, 0)
    T2 = series_variable(ring, 2, 3, 1)
    assert (T1 * T2).coefficient((1, 1)) == 1
    assert (T1 * T2 * T1).is_zero()
    assert series_pow(T1 + T2, 3).is_zero()


def test_series_shapes_must_agree():
    f = series_variable(ResidueRing(5, 2), 1, 4, 0)
    g = series_variable(ResidueRing(5, 3), 1, 4, 0)
    with pytest.raises(RingMismatchError):
        series_mul(f, g)
    with pytest.raises(RingMismatchError):
        series_eval(f, [1, 2])


def test_series_eval():
    ring = ResidueRing(7, 2)
    f = series_from_terms(ring, 2, 4, [[3, 0, 0], [2, 1, 0], [5, 1, 2]])
    assert series_eval(f, [4, 6]) == (3 + 2 * 4 + 5 * 4 * 36) % 49


def test_one_plus_t_times_one_minus_t():
    ring = ResidueRing(5, 2)
    f = series_from_terms(ring, 1, 3, [[1, 0], [1, 1]])
    g = series_from_terms(ring, 1, 3, [[1, 0], [-1, 1]])
    assert series_mul(f, g) == series_from_terms(ring, 1, 3, [[1, 0], [-1, 2]])


def test_omega_one_for_five():
    ring = ResidueRing(5, 2)
    omega = omega_series(ring, 1, 3, 1, 0)
    assert omega == series_from_terms(ring, 1, 3, [[5, 1], [10, 2]])
    assert series_eval(omega, [0]) == 0


def test_omega_and_nu_series():
    ring = ResidueRing(3, 3)
    omega = omega_series(ring, 1, 10, 1, 0)
    nu = nu_series(ring, 1, 10, 1, 0)
    assert omega == series_from_terms(ring, 1, 10, [[3, 1], [3, 2], [1, 3]])
    assert nu == series_from_terms(ring, 1, 10, [[3, 0], [3, 1], [1, 2]])
    assert series_mul(nu, series_variable(ring, 1, 10, 0)) == omega


def test_nu_ratio_divides_omega_levels():
    ring = ResidueRing(3, 3)
    ratio = nu_ratio_series(ring, 2, 12, 2, 1, 1)
    omega_1 = omega_series(ring, 2, 12, 1, 1)
    omega_2 = omega_series(ring, 2, 12, 2, 1)
    assert series_mul(ratio, omega_1) == omega_2
    with pytest.raises(ParameterError):
        nu_ratio_series(ring, 2, 12, 1, 2, 0)


def test_multiplication_matrix_rows():
    ring = ResidueRing(5, 1)
    f = series_from_terms(ring, 1, 3, [[2, 0], [1, 1]])
    assert multiplication_matrix(f) == [[2, 1, 0], [0, 2, 1], [0, 0, 2]]


def test_howell_form_of_forms_is_unchanged():
    ring = ResidueRing(5, 2)
    identity = howell_form([[1, 0], [0, 1]], ring)
    assert identity.rows == [[1, 0], [0, 1]]
    diagonal = howell_form([[5, 0], [0, 5]], ring)
    assert diagonal.rows == [[5, 0], [0, 5]]
    assert diagonal.span_size() == 25


def test_howell_span_of_dependent_rows():
    ring = ResidueRing(3, 3)
    # the second row is three times the first; the span has 27 elements, not 27 * 9
    assert span_size_log([[3, 1], [9, 3]], ring, 2) == 3
    assert span_size_log([[3, 0]], ring, 2) == 2
    assert span_size_log([], ring, 2) == 0


def test_howell_span_matches_enumeration():
    ring = ResidueRing(3, 2)
    rng = random.Random(7)
    for _ in range(40):
        cols = rng.randint(1, 3)
        rows = [[rng.randrange(9) for _ in range(cols)] for _ in range(rng.randint(1, 3))]
        assert ring.p ** span_size_log(rows, ring, cols) == brute_span_size(rows, 9, cols)


def test_howell_transform_reproduces_form():
    ring = ResidueRing(5, 2)
    M = [[5, 10, 3], [0, 25, 15], [10, 1, 0]]
    H = howell_form(M, ring)
    padded = M + [[0, 0, 0]] * 3
    product_rows = [
        [sum(u * m for u, m in zip(urow, col)) % 25 for col in zip(*padded)]
        for urow in H.transform
    ]
    assert product_rows[: len(H.rows)] == H.rows
    assert all(not any(row) for row in product_rows[len(H.rows):])


def test_kernel_and_preimage():
    ring = ResidueRing(3, 3)
    kernel = row_kernel([[3]], ring, 1, 1)
    assert span_size_log(kernel, ring, 1) == 1
    # v -> (v, 2v) lands in span{(0, 1)} only when v = 0
    assert span_size_log(preimage([[1, 2]], [[0, 1]], ring, 1, 2), ring, 1) == 0
    assert span_size_log(preimage([[1, 2]], [[1, 2]], ring, 1, 2), ring, 1) == 3


def test_quotient_invariants():
    ring = ResidueRing(3, 3)
    identity = [[1, 0], [0, 1]]
    assert quotient_invariants([[9, 0], [0, 3]], identity, ring, 2) == [1, 2]
    assert quotient_invariants(identity, identity, ring, 2) == []
    assert quotient_invariants([], identity, ring, 2) == [3, 3]


def test_smith_form():
    M = [[2, 4], [6, 8]]
    snf = smith_form(M)
    assert snf.diagonal == [2, 4]
    D = sympy.Matrix(snf.left) * sympy.Matrix(M) * sympy.Matrix(snf.right)
    assert D == sympy.diag(2, 4)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_smith_form_of_unimodular_corner(p):
    snf = smith_form([[p, 0], [1, p**2]])
    assert snf.diagonal == [1, p**3]


def test_smith_form_trivial_cases():
    assert smith_form([[0, 0], [0, 0]]).diagonal == [0, 0]
    assert smith_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]]).diagonal == [1, 1, 1]


def test_smith_form_divisibility_chain():
    rng = random.Random(3)
    for _ in range(20):
        M = [[rng.randint(-9, 9) for _ in range(3)] for _ in range(3)]
        snf = smith_form(M)
        d = snf.diagonal
        for a, b in zip(d, d[1:]):
            assert b == 0 or (a != 0 and b % a == 0)
        assert abs(sympy.Matrix(M).det()) == abs(sympy.prod(d))


def test_bigrational_bernoulli_values():
    assert bigrational_bernoulli(1) == Fraction(-1, 2)
    assert bigrational_bernoulli(2) == Fraction(1, 6)
    assert bigrational_bernoulli(12) == Fraction(-691, 2730)
    assert bigrational_bernoulli(13) == 0
    for m in range(2, 41):
        b = sympy.bernoulli(m)
        assert bigrational_bernoulli(m) == Fraction(int(b.p), int(b.q))
    with pytest.raises(ParameterError):
        bigrational_bernoulli(-1)


def test_reduce_fraction():
    ring = ResidueRing(5, 2)
    assert reduce_fraction(Fraction(1, 6), ring) == 21
    with pytest.raises(NonUnitDivisionError):
        reduce_fraction(Fraction(1, 10), ring)


def test_series_arithmetic_matches_enumeration_on_tiny_ring():
    ring = ResidueRing(3, 1)
    for a, b in product(range(3), repeat=2):
        f = series_from_terms(ring, 1, 2, [[a, 0], [1, 1]])
        g = series_from_terms(ring, 1, 2, [[b, 0], [2, 1]])
        h = series_mul(f, g)
        assert h.coefficient((0,)) == a * b % 3
        assert h.coefficient((1,)) == (2 * a + b) % 3


def random_series(rng: random.Random, ring: ResidueRing, r: int, D: int) -> TruncatedSeries:
    coeffs = {e: rng.randrange(ring.modulus) for e in monomials(r, D) if rng.random() < 0.5}
    return TruncatedSeries(ring, r, D, coeffs)


def test_series_ring_axioms_on_random_triples():
    ring = ResidueRing(3, 2)
    rng = random.Random(11)
    one = TruncatedSeries(ring, 2, 4, {(0, 0): 1})
    for _ in range(25):
        f, g, h = (random_series(rng, ring, 2, 4) for _ in range(3))
        assert (f * g) * h == f * (g * h)
        assert f * g == g * f
        assert f * (g + h) == f * g + f * h
        assert (f + g) - g == f
        assert f + (-f) == TruncatedSeries(ring, 2, 4)
        assert f * one == f


def test_evaluation_is_a_ring_homomorphism():
    # points in pZ^r with D >= N: every truncated monomial evaluates to 0 mod p^N
    ring = ResidueRing(3, 2)
    rng = random.Random(5)
    for _ in range(25):
        f, g = random_series(rng, ring, 2, 4), random_series(rng, ring, 2, 4)
        point = [3 * rng.randrange(3), 3 * rng.randrange(3)]
        fx, gx = series_eval(f, point), series_eval(g, point)
        assert series_eval(f * g, point) == fx * gx % 9
        assert series_eval(f + g, point) == (fx + gx) % 9


def random_unimodular(rng: random.Random, n: int, mod: int) -> list[list[int]]:
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(3 * n if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.randrange(mod)
        U[i] = [(a + c * b) % mod for a, b in zip(U[i], U[j])]
    k = rng.randrange(n)
    U[k] = [a * 2 % mod for a in U[k]]
    return U


def test_howell_form_is_idempotent_and_canonical():
    ring = ResidueRing(3, 3)
    rng = random.Random(13)
    for _ in range(30):
        cols = rng.randint(1, 4)
        M = [[rng.randrange(27) for _ in range(cols)] for _ in range(rng.randint(1, 4))]
        H = howell_form(M, ring, cols, with_transform=False)
        assert howell_form(H.rows, ring, cols, with_transform=False).rows == H.rows
        U = random_unimodular(rng, len(M), 27)
        UM = [[sum(u * m for u, m in zip(urow, col)) % 27 for col in zip(*M)] for urow in U]
        assert howell_form(UM, ring, cols, with_transform=False).rows == H.rows


def test_smith_cokernel_matches_enumeration():
    rng = random.Random(17)
    checked = 0
    while checked < 40:
        n = rng.choice([2, 3])
        M = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)]
        det = abs(int(sympy.Matrix(M).det()))
        if det == 0 or det > 40:
            continue
        cokernel = abs(sympy.prod(smith_form(M).diagonal))
        assert cokernel == det**n // brute_span_size(M, det, n)
        checked += 1


def test_von_staudt_clausen():
    for m in range(2, 401, 2):
        total = bigrational_bernoulli(m)
        for ell in sympy.primerange(2, m + 2):
            if m % (ell - 1) == 0:
                total += Fraction(1, int(ell))
        assert total.denominator == 1, m


def test_bernoulli_cache_under_threads(monkeypatch):
    monkeypatch.setattr(modarith, "_BERNOULLI", [Fraction(1), Fraction(-1, 2)])
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(bigrational_bernoulli, [250] * 8))
    b = sympy.bernoulli(250)
    assert results == [Fraction(int(b.p), int(b.q))] * 8
    assert len(modarith._BERNOULLI) == 251
    for m in (2, 12, 100, 248):
        b = sympy.bernoulli(m)
        assert modarith._BERNOULLI[m] == Fraction(int(b.p), int(b.q))
    assert all(modarith._BERNOULLI[m] == 0 for m in range(3, 251, 2))
