"""Iwasawa series of the p-adic L-function on an irregular eigenspace.

The series g(T) is pinned down by interpolation: for m = k mod (p - 1),

    g((1 + p)^(1 - m) - 1) = -(1 - p^(m-1)) B_m / m,

so T is the coordinate gamma - 1 with gamma acting as 1 + p on p-power roots
of unity. It is built as a Riemann sum of the regularized Bernoulli measure
at level n (residues modulo p^(n+1)), then divided by the regularizing factor.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np
import sympy

from python.helpers.errors import ParameterError, PrecisionExhaustedError
from python.helpers.irregular import check_odd_prime, irregular_indices, is_irregular_pair
from python.helpers.modarith import (
    ResidueRing,
    TruncatedSeries,
    series_inverse,
    series_mul,
    series_neg,
    series_sub,
    series_constant,
)
from python.helpers.print_style import PrintStyle


@dataclass
class CharSeries:
    p: int
    k: int
    n: int
    N: int
    D: int
    g: TruncatedSeries
    precisions: list[int]
    mu: int | None = None
    lam: int | None = None
    c_mod_p: int | None = None

    def coefficients(self) -> list[int]:
        return [self.g.coefficient((j,)) for j in range(self.D)]


@dataclass
class Condition2Result:
    p: int
    holds: bool | None
    series: dict[int, CharSeries] = field(default_factory=dict)
    reason: str = ""


def teichmuller(b: int, p: int, M: int) -> int:
    """omega(b) mod p^M."""
    return pow(b, p ** (M - 1), p**M)


def gamma_log(x: int, p: int, n: int) -> int:
    """e mod p^n with x = (1 + p)^e mod p^(n+1); x must be 1 mod p."""
    P = p ** (n + 1)
    gamma = 1 + p
    if x % p != 1:
        raise ParameterError(f"{x} is not a principal unit mod {p}")
    e = 0
    x %= P
    for j in range(n):
        digit = ((x - 1) // p ** (j + 1)) % p
        e += digit * p**j
        x = x * pow(gamma, -digit * p**j, P) % P
    return e


def coefficient_precision(p: int, n: int, N: int, j: int) -> int:
    """Certified p-adic precision of the T^j coefficient at level n."""
    if j == 0:
        return min(N, n + 1)
    drop = 0
    while j >= p:
        j //= p
        drop += 1
    return max(0, min(N, n - drop))


def _binomial_series(ring: ResidueRing, D: int, exponent: int) -> TruncatedSeries:
    """(1 + T)^exponent for a non-negative integer exponent."""
    return TruncatedSeries(
        ring, 1, D, {(j,): comb(exponent, j) for j in range(min(exponent, D - 1) + 1)}
    )


def stickelberger_series(p: int, k: int, n: int, D: int, twist: int | None = None) -> TruncatedSeries:
    """sum over units a mod p^(n+1) of omega^(k-1)(a) (1+T)^(-e(a)) E(a), mod p^(n+1).

    E is the Bernoulli distribution regularized by `twist` (a primitive root),
    E(a + p^(n+1) Z_p) = (a - twist * a') / p^(n+1) + (twist - 1) / 2 with
    a' = a / twist mod p^(n+1). Units are enumerated as omega(b) * gamma^e.
    """
    ring = ResidueRing(p, n + 1)
    P = ring.modulus
    q = p**n
    gamma = 1 + p
    twist = twist or int(sympy.primitive_root(p))
    twist_inv = pow(twist, -1, P)
    half = (twist - 1) * pow(2, -1, P) % P
    dtype = np.int64 if P * max(P, twist + 1) < 2**62 else object

    gamma_powers = [1] * q
    for e in range(1, q):
        gamma_powers[e] = gamma_powers[e - 1] * gamma % P
    gpow = np.array(gamma_powers, dtype=dtype)

    weights = np.zeros(q, dtype=dtype)
    for b in range(1, p):
        omega_b = pow(b, q, P)
        weight = pow(omega_b, k - 1, P)
        a = omega_b * gpow % P
        a_prime = a * twist_inv % P
        measure = ((a - twist * a_prime) // P + half) % P
        weights = (weights + weight * measure) % P

    # Horner in (1 + T) over the reduced exponent e' = -e mod p^n
    acc = [0] * D
    for e_prime in range(q - 1, -1, -1):
        shifted = [acc[0]] + [acc[j] + acc[j - 1] for j in range(1, D)]
        shifted[0] += int(weights[(-e_prime) % q])
        acc = [x % P for x in shifted]
    return TruncatedSeries(ring, 1, D, {(j,): acc[j] for j in range(D)})


def regularizing_factor(p: int, k: int, n: int, D: int, twist: int | None = None) -> TruncatedSeries:
    """1 - twist * omega(twist)^(k-1) (1+T)^(-e(twist)), the series form of 1 - twist^m."""
    ring = ResidueRing(p, n + 1)
    P = ring.modulus
    twist = twist or int(sympy.primitive_root(p))
    omega_t = teichmuller(twist, p, n + 1)
    principal = twist * pow(omega_t, -1, P) % P
    e = gamma_log(principal, p, n)
    factor = twist * pow(omega_t, k - 1, P) % P
    power = _binomial_series(ring, D, (-e) % p**n)
    scaled = TruncatedSeries(ring, 1, D, {key: factor * c for key, c in power.coeffs.items()})
    return series_sub(series_constant(ring, 1, D, 1), scaled)


def weierstrass_data(g: TruncatedSeries, precisions: list[int] | None = None) -> tuple[int, int]:
    """(mu, lambda) of a one-variable series whose coefficient j is known mod p^precisions[j]."""
    if g.r != 1:
        raise ParameterError("Weierstrass data needs a one-variable series")
    ring = g.ring
    if precisions is None:
        precisions = [ring.N] * g.D
    exact: dict[int, int] = {}
    bounds: dict[int, int] = {}
    for j in range(g.D):
        prec = precisions[j]
        a = g.coefficient((j,)) % ring.p**prec if prec > 0 else 0
        if a:
            exact[j] = ring.valuation(a)
        else:
            bounds[j] = prec
    if not exact:
        raise PrecisionExhaustedError(
            "every coefficient vanishes at the working precision", stage="lfunc"
        )
    mu = min(exact.values())
    lam = min(j for j, v in exact.items() if v == mu)
    for j, bound in bounds.items():
        if bound < mu or (j < lam and bound <= mu):
            raise PrecisionExhaustedError(
                f"coefficient {j} is only known mod p^{bound}", stage="lfunc"
            )
    return mu, lam


def c_mod_p(g: TruncatedSeries, precisions: list[int] | None = None) -> int:
    """c = -a_0 / (p a_1) mod p for a series of shape (T - cp) * unit."""
    ring = g.ring
    if precisions is None:
        precisions = [ring.N] * g.D
    mu, lam = weierstrass_data(g, precisions)
    if (mu, lam) != (0, 1):
        raise ParameterError(f"series has (mu, lambda) = ({mu}, {lam}), not (0, 1)")
    if precisions[0] < 2:
        raise PrecisionExhaustedError("c needs the constant term mod p^2", stage="lfunc")
    p = ring.p
    a0 = g.coefficient((0,)) % p**2
    a1 = g.coefficient((1,)) % p
    return -(a0 // p) * pow(a1, -1, p) % p


def char_series(p: int, k: int, n: int = 1, N: int = 2, D: int = 8) -> CharSeries:
    check_odd_prime(p)
    if n < 1:
        raise ParameterError(f"level must be at least 1, got {n}")
    if D < 2:
        raise ParameterError(f"degree cap must be at least 2, got {D}")
    if N < 1 or N > n + 1:
        raise PrecisionExhaustedError(
            f"precision p^{N} exceeds what level {n} certifies (p^{n + 1})", stage="lfunc"
        )
    if not is_irregular_pair(p, k):
        raise ParameterError(f"({p}, {k}) is not an irregular pair")

    G = stickelberger_series(p, k, n, D)
    U = regularizing_factor(p, k, n, D)
    full = series_neg(series_mul(G, series_inverse(U)))
    ring = ResidueRing(p, N)
    g = TruncatedSeries(ring, 1, D, dict(full.coeffs))
    precisions = [coefficient_precision(p, n, N, j) for j in range(D)]
    result = CharSeries(p=p, k=k, n=n, N=N, D=D, g=g, precisions=precisions)

    try:
        result.mu, result.lam = weierstrass_data(g, precisions)
    except PrecisionExhaustedError as e:
        PrintStyle.warning(f"p={p}, k={k}: {e}")
        return result
    if result.mu != 0:
        PrintStyle.warning(f"p={p}, k={k}: mu = {result.mu} is nonzero")
    elif result.lam == 1 and N >= 2:
        result.c_mod_p = c_mod_p(g, precisions)
    return result


def condition2(p: int, n: int = 1, N: int = 2, D: int = 8) -> Condition2Result:
    """c != 1 mod p for the unique irregular index; None when undecidable here."""
    record = irregular_indices(p)
    if record.regular:
        raise ParameterError(f"{p} is regular: no irregular eigenspace")
    result = Condition2Result(p=p, holds=None)
    for k in record.indices:
        try:
            result.series[k] = char_series(p, k, n, N, D)
        except PrecisionExhaustedError as e:
            result.reason = str(e)
    if record.index_of_irregularity != 1:
        result.reason = f"index of irregularity is {record.index_of_irregularity}"
        return result
    (k,) = record.indices
    series = result.series.get(k)
    if series is None or series.mu is None:
        result.reason = result.reason or "precision exhausted"
        return result
    if (series.mu, series.lam) != (0, 1):
        PrintStyle.warning(
            f"p={p}: series has (mu, lambda) = ({series.mu}, {series.lam}); shape (T - cp)u fails"
        )
        result.holds = False
        result.reason = "series is not of the form (T - cp)u"
        return result
    if series.c_mod_p is None:
        result.reason = "c needs precision N >= 2"
        return result
    result.holds = series.c_mod_p != 1
    return result
