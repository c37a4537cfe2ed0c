import pytest
import sympy

from python.helpers.errors import ParameterError, PrecisionExhaustedError
from python.helpers.irregular import irregular_indices, kummer_value
from python.helpers.lfunc import (
    c_mod_p,
    char_series,
    coefficient_precision,
    condition2,
    gamma_log,
    regularizing_factor,
    teichmuller,
    weierstrass_data,
)
from python.helpers.modarith import (
    ResidueRing,
    series_eval,
    series_from_terms,
    series_mul,
)


def interpolation_point(p: int, m: int, N: int) -> int:
    modulus = p**N
    return (pow(1 + p, 1 - m, modulus) - 1) % modulus


def test_teichmuller_is_a_root_of_unity():
    for b in range(1, 5):
        w = teichmuller(b, 5, 3)
        assert w % 5 == b
        assert pow(w, 4, 125) == 1


def test_gamma_log_inverts_powers_of_one_plus_p():
    for e in range(9):
        assert gamma_log(pow(4, e, 27), 3, 2) == e
    assert gamma_log(pow(38, 40, 37**3), 37, 2) == 40
    with pytest.raises(ParameterError):
        gamma_log(2, 3, 2)


def test_coefficient_precision():
    assert coefficient_precision(37, 1, 2, 0) == 2
    assert coefficient_precision(37, 1, 2, 5) == 1
    assert coefficient_precision(37, 1, 2, 37) == 0
    assert coefficient_precision(3, 2, 3, 3) == 1
    assert coefficient_precision(3, 4, 3, 2) == 3


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("m", [32, 32 + 36])
def test_interpolation_at_two_points(n, m):
    p, k = 37, 32
    N = n + 1
    series = char_series(p, k, n=n, N=N, D=8)
    value = series_eval(series.g, [interpolation_point(p, m, N)])
    assert value == -kummer_value(p, m, N) % p**N


def test_regularizing_factor_interpolates_one_minus_c_to_the_m():
    p, k, n = 37, 32, 1
    c = int(sympy.primitive_root(p))
    factor = regularizing_factor(p, k, n, 8)
    for m in (32, 68):
        point = interpolation_point(p, m, n + 1)
        assert series_eval(factor, [point]) == (1 - pow(c, m, p**2)) % p**2


def test_levels_agree_mod_p():
    low = char_series(37, 32, n=1, N=1, D=8)
    high = char_series(37, 32, n=2, N=1, D=8)
    assert low.coefficients() == high.coefficients()


def test_char_series_shape_for_37():
    series = char_series(37, 32)
    assert (series.mu, series.lam) == (0, 1)
    assert series.g.coefficient((0,)) % 37 == 0
    assert series.c_mod_p is not None
    assert series.c_mod_p != 1


def test_char_series_errors():
    with pytest.raises(ParameterError):
        char_series(37, 30)
    with pytest.raises(ParameterError):
        char_series(39, 32)
    with pytest.raises(PrecisionExhaustedError):
        char_series(37, 32, n=1, N=3)
    with pytest.raises(ParameterError):
        char_series(37, 32, n=0, N=1)


def test_weierstrass_data_shapes():
    ring = ResidueRing(5, 3)
    assert weierstrass_data(series_from_terms(ring, 1, 6, [[-15, 0], [1, 1], [7, 2]])) == (0, 1)
    assert weierstrass_data(series_from_terms(ring, 1, 6, [[5, 0], [5, 1]])) == (1, 0)
    assert weierstrass_data(series_from_terms(ring, 1, 6, [[25, 0], [10, 3]])) == (1, 3)


def test_weierstrass_data_needs_precision():
    ring = ResidueRing(5, 3)
    with pytest.raises(PrecisionExhaustedError):
        weierstrass_data(series_from_terms(ring, 1, 4, []))
    # the constant term is unknown, so lambda = 1 cannot be certified
    g = series_from_terms(ring, 1, 4, [[1, 1]])
    with pytest.raises(PrecisionExhaustedError):
        weierstrass_data(g, [0, 3, 3, 3])


@pytest.mark.parametrize(
    "unit",
    [
        [[1, 0], [4, 1], [7, 2]],
        [[3, 0], [1, 1]],
        [[2, 0], [5, 1], [11, 3]],
    ],
)
def test_c_is_independent_of_the_unit_factor(unit):
    ring = ResidueRing(5, 3)
    distinguished = series_from_terms(ring, 1, 6, [[-10, 0], [1, 1]])
    g = series_mul(distinguished, series_from_terms(ring, 1, 6, unit))
    assert c_mod_p(g) == 2


def test_c_mod_p_rejects_other_shapes():
    ring = ResidueRing(5, 3)
    with pytest.raises(ParameterError):
        c_mod_p(series_from_terms(ring, 1, 6, [[-25, 0], [5, 1], [1, 2]]))


def test_condition2_for_37():
    result = condition2(37)
    assert result.holds is True
    assert set(result.series) == {32}


def test_condition2_on_regular_prime():
    with pytest.raises(ParameterError):
        condition2(7)


def test_condition2_needs_index_one():
    result = condition2(157)
    assert result.holds is None
    assert "index of irregularity is 2" in result.reason
    assert set(result.series) == {62, 110}


def test_condition2_without_mod_p_squared():
    result = condition2(37, n=1, N=1)
    assert result.holds is None


@pytest.mark.slow
def test_condition2_below_400():
    for p in sympy.primerange(3, 400):
        record = irregular_indices(int(p))
        if record.index_of_irregularity != 1:
            continue
        result = condition2(int(p))
        (series,) = result.series.values()
        assert (series.mu, series.lam) == (0, 1)
        assert result.holds is True
