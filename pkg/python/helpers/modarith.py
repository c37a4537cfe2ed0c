"""Exact arithmetic kernels.

Residue rings Z/p^N, truncated multivariate series over them, Howell-form
linear algebra over Z/p^N, Smith normal form over Z and exact Bernoulli
numbers. Everything here is a pure function of its inputs.
"""

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import comb
from typing import Iterable, Mapping, Sequence

import sympy

from python.helpers.errors import (
    NonUnitDivisionError,
    ParameterError,
    RingMismatchError,
)

Exponent = tuple[int, ...]
IntMatrix = list[list[int]]


@dataclass(frozen=True)
class ResidueRing:
    p: int
    N: int

    def __post_init__(self):
        if self.p < 3 or not sympy.isprime(self.p):
            raise ParameterError(f"{self.p} is not an odd prime")
        if self.N < 1:
            raise ParameterError(f"precision must be at least 1, got {self.N}")

    @cached_property
    def modulus(self) -> int:
        return self.p**self.N

    def reduce(self, a: int) -> int:
        return a % self.modulus

    def valuation(self, a: int) -> int:
        """p-adic valuation of a residue, capped at N (zero has valuation N)."""
        a %= self.modulus
        if a == 0:
            return self.N
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def is_unit(self, a: int) -> bool:
        return a % self.p != 0

    def inverse(self, a: int) -> int:
        if not self.is_unit(a):
            raise NonUnitDivisionError(
                f"{a % self.modulus} is not a unit modulo {self.p}^{self.N}"
            )
        return pow(a, -1, self.modulus)

    def divide(self, a: int, b: int) -> int:
        return a * self.inverse(b) % self.modulus

    def lift(self, N: int) -> "ResidueRing":
        return ResidueRing(self.p, N)


# ---------------------------------------------------------------------------
# truncated series
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def monomials(r: int, D: int) -> tuple[Exponent, ...]:
    """Exponent vectors with total degree below D, graded then lexicographic."""
    return tuple(
        sorted(
            (e for e in product(range(D), repeat=r) if sum(e) < D),
            key=lambda e: (sum(e), e),
        )
    )


@lru_cache(maxsize=None)
def monomial_index(r: int, D: int) -> dict[Exponent, int]:
    return {e: i for i, e in enumerate(monomials(r, D))}


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    ring: ResidueRing
    r: int
    D: int
    coeffs: Mapping[Exponent, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.r < 1 or self.D < 1:
            raise ParameterError(f"bad series shape r={self.r}, D={self.D}")
        clean: dict[Exponent, int] = {}
        for e, c in self.coeffs.items():
            e = tuple(e)
            if len(e) != self.r or any(x < 0 for x in e):
                raise ParameterError(f"bad exponent {e} for r={self.r}")
            if sum(e) >= self.D:
                continue
            c = (clean.get(e, 0) + c) % self.ring.modulus
            if c:
                clean[e] = c
            else:
                clean.pop(e, None)
        object.__setattr__(self, "coeffs", clean)

    def shape(self) -> tuple[int, int, int, int]:
        return (self.ring.p, self.ring.N, self.r, self.D)

    def coefficient(self, e: Exponent) -> int:
        return self.coeffs.get(tuple(e), 0)

    def constant_term(self) -> int:
        return self.coefficient((0,) * self.r)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.constant_term())

    def to_vector(self) -> list[int]:
        return [self.coefficient(e) for e in monomials(self.r, self.D)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.shape() == other.shape() and self.coeffs == other.coeffs

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return series_add(self, other)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return series_sub(self, other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return series_mul(self, other)

    def __neg__(self) -> "TruncatedSeries":
        return series_neg(self)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for e in monomials(self.r, self.D):
            c = self.coeffs.get(e)
            if c is None:
                continue
            mono = "*".join(
                f"T{i + 1}" + (f"^{x}" if x > 1 else "") for i, x in enumerate(e) if x
            )
            terms.append(f"{c}*{mono}" if mono else str(c))
        return " + ".join(terms)


def _check_compatible(f: TruncatedSeries, g: TruncatedSeries):
    if f.shape() != g.shape():
        raise RingMismatchError(f"series shapes differ: {f.shape()} vs {g.shape()}")


def series_zero(ring: ResidueRing, r: int, D: int) -> TruncatedSeries:
    return TruncatedSeries(ring, r, D, {})


def series_constant(ring: ResidueRing, r: int, D: int, c: int) -> TruncatedSeries:
    return TruncatedSeries(ring, r, D, {(0,) * r: c})


def series_monomial(
    ring: ResidueRing, r: int, D: int, e: Exponent, c: int = 1
) -> TruncatedSeries:
    return TruncatedSeries(ring, r, D, {tuple(e): c})


def series_variable(ring: ResidueRing, r: int, D: int, i: int) -> TruncatedSeries:
    """T_{i+1} (zero-based index i)."""
    e = [0] * r
    e[i] = 1
    return series_monomial(ring, r, D, tuple(e))


def series_add(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    _check_compatible(f, g)
    out = dict(f.coeffs)
    for e, c in g.coeffs.items():
        out[e] = out.get(e, 0) + c
    return TruncatedSeries(f.ring, f.r, f.D, out)


def series_neg(f: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(f.ring, f.r, f.D, {e: -c for e, c in f.coeffs.items()})


def series_sub(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    return series_add(f, series_neg(g))


def series_scale(f: TruncatedSeries, c: int) -> TruncatedSeries:
    return TruncatedSeries(f.ring, f.r, f.D, {e: c * x for e, x in f.coeffs.items()})


def series_mul(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    _check_compatible(f, g)
    out: dict[Exponent, int] = {}
    D = f.D
    for e1, c1 in f.coeffs.items():
        d1 = sum(e1)
        for e2, c2 in g.coeffs.items():
            if d1 + sum(e2) >= D:
                continue
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return TruncatedSeries(f.ring, f.r, D, out)


def series_pow(f: TruncatedSeries, k: int) -> TruncatedSeries:
    if k < 0:
        return series_pow(series_inverse(f), -k)
    result = series_constant(f.ring, f.r, f.D, 1)
    base = f
    while k:
        if k & 1:
            result = series_mul(result, base)
        base = series_mul(base, base)
        k >>= 1
    return result


def series_inverse(f: TruncatedSeries) -> TruncatedSeries:
    """Inverse of a unit series; the non-constant part is nilpotent below D."""
    c0 = f.constant_term()
    c0_inv = f.ring.inverse(c0)
    one = series_constant(f.ring, f.r, f.D, 1)
    h = series_sub(one, series_scale(f, c0_inv))
    total = one
    power = one
    for _ in range(1, f.D):
        power = series_mul(power, h)
        if power.is_zero():
            break
        total = series_add(total, power)
    return series_scale(total, c0_inv)


def series_eval(f: TruncatedSeries, point: Sequence[int]) -> int:
    """Substitute residues for T_1..T_r; the result is a residue mod p^N."""
    if len(point) != f.r:
        raise RingMismatchError(f"expected {f.r} coordinates, got {len(point)}")
    mod = f.ring.modulus
    total = 0
    for e, c in f.coeffs.items():
        term = c
        for x, k in zip(point, e):
            if k:
                term = term * pow(x, k, mod) % mod
        total += term
    return total % mod


def series_from_terms(
    ring: ResidueRing, r: int, D: int, terms: Iterable[Sequence[int]]
) -> TruncatedSeries:
    """Build a series from [coeff, e1, ..., er] lists."""
    coeffs: dict[Exponent, int] = {}
    for term in terms:
        if len(term) != r + 1:
            raise ParameterError(f"term {list(term)} does not have {r} exponents")
        e = tuple(int(x) for x in term[1:])
        coeffs[e] = coeffs.get(e, 0) + int(term[0])
    return TruncatedSeries(ring, r, D, coeffs)


def omega_series(ring: ResidueRing, r: int, D: int, n: int, i: int) -> TruncatedSeries:
    """omega_n(T_i) = (1 + T_i)^(p^n) - 1."""
    q = ring.p**n
    coeffs = {}
    for j in range(1, min(q, D - 1) + 1):
        e = [0] * r
        e[i] = j
        coeffs[tuple(e)] = comb(q, j)
    return TruncatedSeries(ring, r, D, coeffs)


def nu_series(ring: ResidueRing, r: int, D: int, n: int, i: int) -> TruncatedSeries:
    """nu_n(T_i) = omega_n(T_i) / T_i."""
    q = ring.p**n
    coeffs = {}
    for j in range(1, min(q, D) + 1):
        e = [0] * r
        e[i] = j - 1
        coeffs[tuple(e)] = comb(q, j)
    return TruncatedSeries(ring, r, D, coeffs)


def nu_ratio_series(
    ring: ResidueRing, r: int, D: int, m: int, n: int, i: int
) -> TruncatedSeries:
    """omega_m(T_i) / omega_n(T_i) for m >= n, the sum of (1+T_i)^(k p^n)."""
    if m < n:
        raise ParameterError(f"level {m} is below level {n}")
    step = ring.p**n
    coeffs: dict[Exponent, int] = {}
    for k in range(ring.p ** (m - n)):
        for j in range(min(k * step, D - 1) + 1):
            e = [0] * r
            e[i] = j
            key = tuple(e)
            coeffs[key] = coeffs.get(key, 0) + comb(k * step, j)
    return TruncatedSeries(ring, r, D, coeffs)


def multiplication_matrix(f: TruncatedSeries) -> IntMatrix:
    """Row a holds the coordinates of monomial_a * f in the monomial basis."""
    basis = monomials(f.r, f.D)
    index = monomial_index(f.r, f.D)
    mod = f.ring.modulus
    rows: IntMatrix = []
    for a in basis:
        row = [0] * len(basis)
        da = sum(a)
        for e, c in f.coeffs.items():
            if da + sum(e) >= f.D:
                continue
            row[index[tuple(x + y for x, y in zip(a, e))]] = c % mod
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# linear algebra over Z/p^N
# ---------------------------------------------------------------------------


@dataclass
class HowellForm:
    ring: ResidueRing
    cols: int
    rows: IntMatrix
    pivots: list[tuple[int, int]]  # (column, valuation) per row
    transform: IntMatrix | None = None

    def span_size_log(self) -> int:
        """log_p of the number of elements in the row module."""
        return sum(self.ring.N - v for _, v in self.pivots)

    def span_size(self) -> int:
        return self.ring.p ** self.span_size_log()


def howell_form(
    M: Sequence[Sequence[int]],
    ring: ResidueRing,
    cols: int | None = None,
    with_transform: bool = True,
) -> HowellForm:
    """Howell normal form of the row module of M over Z/p^N.

    The matrix is padded with `cols` zero rows so an annihilator row always
    has a free slot. When requested, the transform U satisfies
    U * [M; 0] = [H; 0] and is invertible over Z/p^N.
    """
    if cols is None:
        cols = len(M[0]) if M else 0
    p, N, mod = ring.p, ring.N, ring.modulus
    A = [[x % mod for x in row] for row in M]
    for row in A:
        if len(row) != cols:
            raise RingMismatchError("matrix rows have inconsistent lengths")
    A.extend([0] * cols for _ in range(cols))
    n = len(A)
    U = [[int(i == j) for j in range(n)] for i in range(n)] if with_transform else None

    def addmul(dst: int, src: int, c: int):
        if c % mod == 0:
            return
        rs, rd = A[src], A[dst]
        for j in range(cols):
            if rs[j]:
                rd[j] = (rd[j] + c * rs[j]) % mod
        if U is not None:
            us, ud = U[src], U[dst]
            for j in range(n):
                if us[j]:
                    ud[j] = (ud[j] + c * us[j]) % mod

    def scale(i: int, c: int):
        A[i] = [x * c % mod for x in A[i]]
        if U is not None:
            U[i] = [x * c % mod for x in U[i]]

    def swap(i: int, j: int):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    pivots: list[tuple[int, int]] = []
    top = 0
    for c in range(cols):
        best, best_v = -1, N
        for i in range(top, n):
            x = A[i][c]
            if x:
                v = ring.valuation(x)
                if v < best_v:
                    best, best_v = i, v
                    if v == 0:
                        break
        if best < 0:
            continue
        swap(top, best)
        pv = p**best_v
        scale(top, pow(A[top][c] // pv, -1, mod))
        for i in range(top + 1, n):
            x = A[i][c]
            if x:
                addmul(i, top, -(x // pv))
        if best_v > 0:
            slot = next(i for i in range(top + 1, n) if not any(A[i]))
            addmul(slot, top, p ** (N - best_v))
        pivots.append((c, best_v))
        top += 1

    for i, (c, v) in enumerate(pivots):
        pv = p**v
        for j in range(i):
            x = A[j][c]
            if x >= pv:
                addmul(j, i, -(x // pv))

    return HowellForm(
        ring=ring,
        cols=cols,
        rows=[A[i] for i in range(top)],
        pivots=pivots,
        transform=U,
    )


def span_size_log(
    rows: Sequence[Sequence[int]], ring: ResidueRing, cols: int
) -> int:
    return howell_form(rows, ring, cols, with_transform=False).span_size_log()


def preimage(
    A: Sequence[Sequence[int]],
    W: Sequence[Sequence[int]],
    ring: ResidueRing,
    in_dim: int,
    out_dim: int,
) -> IntMatrix:
    """Generators of {v : v*A lies in the row module of W} (Howell rows)."""
    aug = [list(row) + [int(i == j) for j in range(in_dim)] for i, row in enumerate(A)]
    aug += [list(row) + [0] * in_dim for row in W]
    H = howell_form(aug, ring, out_dim + in_dim, with_transform=False)
    return [
        row[out_dim:]
        for row, (c, _) in zip(H.rows, H.pivots)
        if c >= out_dim
    ]


def row_kernel(
    A: Sequence[Sequence[int]], ring: ResidueRing, in_dim: int, out_dim: int
) -> IntMatrix:
    return preimage(A, [], ring, in_dim, out_dim)


def image_rows(
    V: Sequence[Sequence[int]], A: Sequence[Sequence[int]], ring: ResidueRing
) -> IntMatrix:
    """Rows v*A for every row v of V."""
    mod = ring.modulus
    if not A:
        return []
    out_dim = len(A[0])
    result = []
    for v in V:
        acc = [0] * out_dim
        for coef, row in zip(v, A):
            if coef:
                for j, x in enumerate(row):
                    if x:
                        acc[j] += coef * x
        result.append([x % mod for x in acc])
    return result


def quotient_invariants(
    sub: Sequence[Sequence[int]],
    sup: Sequence[Sequence[int]],
    ring: ResidueRing,
    cols: int,
) -> list[int]:
    """Exponents e_i (ascending) with span(sup)/span(sub) = sum of Z/p^e_i.

    span(sub) must lie in span(sup). The counts come from the sizes of
    p^j * span(sup) + span(sub) for j = 0..N.
    """
    p = ring.p
    base = span_size_log(sub, ring, cols)
    sizes = []
    for j in range(ring.N + 2):
        scaled = [[x * p**j for x in row] for row in sup]
        sizes.append(span_size_log(list(sub) + scaled, ring, cols) - base)
    at_least = [sizes[j] - sizes[j + 1] for j in range(ring.N + 1)]
    exponents: list[int] = []
    for j in range(ring.N + 1):
        count = at_least[j] - (at_least[j + 1] if j + 1 <= ring.N else 0)
        exponents.extend([j + 1] * count)
    return sorted(exponents)


# ---------------------------------------------------------------------------
# Smith normal form over Z
# ---------------------------------------------------------------------------


@dataclass
class SmithForm:
    diagonal: list[int]
    left: IntMatrix
    right: IntMatrix


def smith_form(M: Sequence[Sequence[int]]) -> SmithForm:
    """Smith normal form with left * M * right = diag(d), d_i | d_(i+1)."""
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    L = [[int(i == j) for j in range(m)] for i in range(m)]
    R = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_add(dst: int, src: int, c: int):
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        L[dst] = [a + c * b for a, b in zip(L[dst], L[src])]

    def col_add(dst: int, src: int, c: int):
        for row in A:
            row[dst] += c * row[src]
        for row in R:
            row[dst] += c * row[src]

    def row_swap(i: int, j: int):
        A[i], A[j] = A[j], A[i]
        L[i], L[j] = L[j], L[i]

    def col_swap(i: int, j: int):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]

    for t in range(min(m, n)):
        while True:
            nonzero = [
                (abs(A[i][j]), i, j)
                for i in range(t, m)
                for j in range(t, n)
                if A[i][j]
            ]
            if not nonzero:
                break
            _, i0, j0 = min(nonzero)
            row_swap(t, i0)
            col_swap(t, j0)
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    row_add(i, t, -(A[i][t] // piv))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    col_add(j, t, -(A[t][j] // piv))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv),
                None,
            )
            if bad is None:
                break
            row_add(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            L[t] = [-x for x in L[t]]

    return SmithForm(diagonal=[A[i][i] for i in range(min(m, n))], left=L, right=R)


# ---------------------------------------------------------------------------
# exact Bernoulli numbers
# ---------------------------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1), Fraction(-1, 2)]
_BERNOULLI_LOCK = threading.Lock()


def bigrational_bernoulli(m: int) -> Fraction:
    """Exact B_m from sum_{j<=m} C(m+1, j) B_j = 0, with B_1 = -1/2."""
    if m < 0:
        raise ParameterError(f"Bernoulli index must be non-negative, got {m}")
    if len(_BERNOULLI) > m:
        return _BERNOULLI[m]
    # entries are appended only while holding the lock
    with _BERNOULLI_LOCK:
        while len(_BERNOULLI) <= m:
            k = len(_BERNOULLI)
            if k % 2:
                _BERNOULLI.append(Fraction(0))
                continue
            total = Fraction(0)
            for j in range(0, k, 2):
                total += comb(k + 1, j) * _BERNOULLI[j]
            total += comb(k + 1, 1) * _BERNOULLI[1]
            _BERNOULLI.append(-total / (k + 1))
    return _BERNOULLI[m]


def reduce_fraction(x: Fraction, ring: ResidueRing) -> int:
    """x mod p^N for a p-integral rational."""
    return x.numerator * ring.inverse(x.denominator) % ring.modulus
