"""Finitely presented modules over truncated Iwasawa algebras.

Lambda = Z_p[[T_1..T_r]] is replaced by Z/p^N[T_1..T_r] / (monomials of total
degree >= D). A module is flattened to a Z/p^N-module: coordinates are
(generator, monomial) pairs in monomial order, relations become the rows
m * rel for every monomial m, and a ring element acts on row vectors through
a block-diagonal multiplication matrix (v -> v A). Every homological
computation below is Howell-form linear algebra on those flattenings.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import prod
from typing import Sequence as Seq

import sympy

from python.helpers.errors import (
    NotFiniteError,
    ParameterError,
    PrecisionExhaustedError,
    RingMismatchError,
)
from python.helpers.modarith import (
    Exponent,
    IntMatrix,
    ResidueRing,
    TruncatedSeries,
    image_rows,
    monomial_index,
    monomials,
    multiplication_matrix,
    nu_ratio_series,
    nu_series,
    omega_series,
    preimage,
    quotient_invariants,
    reduce_fraction,
    row_kernel,
    series_constant,
    series_mul,
    series_pow,
    series_variable,
    smith_form,
    span_size_log,
)
from python.helpers.print_style import PrintStyle

Polynomial = dict[Exponent, int]


# ---------------------------------------------------------------------------
# algebra and modules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncAlgebra:
    p: int
    N: int
    r: int
    D: int

    def __post_init__(self):
        if self.r < 1:
            raise ParameterError(f"need at least one variable, got r={self.r}")
        if self.D < 1:
            raise ParameterError(f"degree cap must be positive, got D={self.D}")

    @cached_property
    def ring(self) -> ResidueRing:
        return ResidueRing(self.p, self.N)

    @property
    def basis(self) -> tuple[Exponent, ...]:
        return monomials(self.r, self.D)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def at(self, N: int, D: int | None = None) -> "TruncAlgebra":
        return TruncAlgebra(self.p, N, self.r, self.D if D is None else D)

    def series(self, poly: Polynomial) -> TruncatedSeries:
        return TruncatedSeries(self.ring, self.r, self.D, dict(poly))

    def constant(self, c: int) -> TruncatedSeries:
        return series_constant(self.ring, self.r, self.D, c)

    def variable(self, i: int) -> TruncatedSeries:
        return series_variable(self.ring, self.r, self.D, i)

    def check(self, f: TruncatedSeries):
        if f.shape() != (self.p, self.N, self.r, self.D):
            raise RingMismatchError(
                f"series shape {f.shape()} is not {(self.p, self.N, self.r, self.D)}"
            )


def lift_series(f: TruncatedSeries) -> Polynomial:
    """Integer polynomial with symmetric coefficients reducing to f."""
    mod = f.ring.modulus
    return {e: c if c <= mod // 2 else c - mod for e, c in f.coeffs.items()}


def polynomial_from_terms(terms: Seq[Seq[int]], r: int) -> Polynomial:
    poly: Polynomial = {}
    for term in terms:
        if len(term) != r + 1:
            raise ParameterError(f"term {list(term)} does not have {r} exponents")
        e = tuple(int(x) for x in term[1:])
        poly[e] = poly.get(e, 0) + int(term[0])
    return {e: c for e, c in poly.items() if c}


def _block_diagonal(block: IntMatrix, copies: int) -> IntMatrix:
    d = len(block)
    rows: IntMatrix = []
    for k in range(copies):
        for row in block:
            rows.append([0] * (k * d) + list(row) + [0] * ((copies - k - 1) * d))
    return rows


def _identity(n: int, scale: int = 1) -> IntMatrix:
    return [[scale if i == j else 0 for j in range(n)] for i in range(n)]


@dataclass(eq=False)
class ModulePresentation:
    """X = Lambda^g / (relations); each relation is a vector of g polynomials."""

    algebra: TruncAlgebra
    generators: int
    relations: list[list[Polynomial]] = field(default_factory=list)

    def __post_init__(self):
        if self.generators < 0:
            raise ParameterError(f"generator count must be non-negative, got {self.generators}")
        for rel in self.relations:
            if len(rel) != self.generators:
                raise ParameterError(
                    f"relation has {len(rel)} entries for {self.generators} generators"
                )

    @classmethod
    def cyclic(cls, algebra: TruncAlgebra, elements: Seq[TruncatedSeries | Polynomial]) -> "ModulePresentation":
        """Lambda / (f_1, ..., f_k)."""
        rels = []
        for f in elements:
            if isinstance(f, TruncatedSeries):
                algebra.check(f)
                f = lift_series(f)
            rels.append([dict(f)])
        return cls(algebra, 1, rels)

    @classmethod
    def from_json(cls, text: str) -> "ModulePresentation":
        from python.helpers.presentation import parse_presentation

        schema = parse_presentation(text)
        algebra = TruncAlgebra(schema.p, schema.precision, schema.r, schema.degree_cap)
        rels = [
            [polynomial_from_terms(poly, schema.r) for poly in rel]
            for rel in schema.relations
        ]
        return cls(algebra, schema.generators, rels)

    def at(self, N: int, D: int | None = None) -> "ModulePresentation":
        """The same integer relations flattened at another precision or degree cap."""
        return ModulePresentation(self.algebra.at(N, D), self.generators, self.relations)

    @property
    def ring(self) -> ResidueRing:
        return self.algebra.ring

    @property
    def flat_dim(self) -> int:
        return self.generators * self.algebra.dim

    def relation_series(self) -> list[list[TruncatedSeries]]:
        return [[self.algebra.series(f) for f in rel] for rel in self.relations]

    @cached_property
    def relation_rows(self) -> IntMatrix:
        rows: IntMatrix = []
        for rel in self.relation_series():
            mats = [multiplication_matrix(f) for f in rel]
            for a in range(self.algebra.dim):
                row: list[int] = []
                for M in mats:
                    row.extend(M[a])
                rows.append(row)
        return rows

    @cached_property
    def relation_span_log(self) -> int:
        return span_size_log(self.relation_rows, self.ring, self.flat_dim)

    def action_matrix(self, f: TruncatedSeries) -> IntMatrix:
        self.algebra.check(f)
        return _block_diagonal(multiplication_matrix(f), self.generators)

    def contains(self, base: IntMatrix, base_log: int, extra: IntMatrix) -> bool:
        return span_size_log(base + extra, self.ring, self.flat_dim) == base_log

    def order_log(self) -> int:
        return self.flat_dim * self.algebra.N - self.relation_span_log

    def invariants(self) -> list[int]:
        return quotient_invariants(
            self.relation_rows, _identity(self.flat_dim), self.ring, self.flat_dim
        )

    def is_zero(self) -> bool:
        return self.order_log() == 0


@dataclass(frozen=True)
class CohomologyGroup:
    """Finite abelian p-group, sum of Z/p^e over the ascending exponents."""

    p: int
    exponents: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(sorted(e for e in self.exponents if e > 0)))

    @property
    def order_log(self) -> int:
        return sum(self.exponents)

    @property
    def order(self) -> int:
        return self.p**self.order_log

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def exponent(self) -> int:
        return self.p ** max(self.exponents, default=0)

    def invariant_factors(self) -> list[int]:
        return [self.p**e for e in self.exponents]

    def is_zero(self) -> bool:
        return not self.exponents

    def torsion(self, n: int) -> "CohomologyGroup":
        """G[p^n]."""
        return CohomologyGroup(self.p, tuple(min(e, n) for e in self.exponents))

    def cotorsion(self, n: int) -> "CohomologyGroup":
        """G / p^n G."""
        return CohomologyGroup(self.p, tuple(min(e, n) for e in self.exponents))

    def __str__(self) -> str:
        if not self.exponents:
            return "0"
        return " + ".join(f"Z/{self.p}^{e}" if e > 1 else f"Z/{self.p}" for e in self.exponents)


# ---------------------------------------------------------------------------
# sequences and Koszul complexes
# ---------------------------------------------------------------------------


class SequenceFlavor(str, Enum):
    OMEGA = "omega"
    NU = "nu"
    CUSTOM = "custom"


@dataclass(eq=False)
class Sequence:
    algebra: TruncAlgebra
    elements: list[TruncatedSeries]
    flavor: SequenceFlavor = SequenceFlavor.CUSTOM
    level: int = 0
    primed: bool = False
    lifts: list[Polynomial] | None = None

    def __len__(self) -> int:
        return len(self.elements)

    def quotient(self) -> ModulePresentation:
        return ModulePresentation.cyclic(self.algebra, self.lifts or self.elements)

    def is_m_primary(self) -> bool:
        """Lambda/(x) is finite and killed by a power of m within the truncation."""
        Q = self.quotient()
        a, b = annihilator_exponents(Q)
        return a < self.algebra.N and b < self.algebra.D


def _variable_sequence(algebra: TruncAlgebra, n: int, flavor: SequenceFlavor, primed: bool) -> Sequence:
    if n < 0:
        raise ParameterError(f"level must be non-negative, got {n}")
    make = omega_series if flavor is SequenceFlavor.OMEGA else nu_series
    elements = [make(algebra.ring, algebra.r, algebra.D, n, i) for i in range(algebra.r)]
    if not primed:
        elements.insert(0, algebra.constant(algebra.p**n))
    return Sequence(algebra, elements, flavor, n, primed)


def omega_sequence(algebra: TruncAlgebra, n: int) -> Sequence:
    """(p^n, omega_n(T_1), ..., omega_n(T_r))."""
    return _variable_sequence(algebra, n, SequenceFlavor.OMEGA, primed=False)


def omega_prime_sequence(algebra: TruncAlgebra, n: int) -> Sequence:
    return _variable_sequence(algebra, n, SequenceFlavor.OMEGA, primed=True)


def nu_sequence(algebra: TruncAlgebra, n: int) -> Sequence:
    """(p^n, nu_n(T_1), ..., nu_n(T_r))."""
    return _variable_sequence(algebra, n, SequenceFlavor.NU, primed=False)


def nu_prime_sequence(algebra: TruncAlgebra, n: int) -> Sequence:
    return _variable_sequence(algebra, n, SequenceFlavor.NU, primed=True)


def custom_sequence(
    algebra: TruncAlgebra, elements: Seq[TruncatedSeries | Polynomial], level: int = 0
) -> Sequence:
    lifts = []
    for f in elements:
        if isinstance(f, TruncatedSeries):
            algebra.check(f)
            f = lift_series(f)
        lifts.append(dict(f))
    return Sequence(
        algebra, [algebra.series(f) for f in lifts], SequenceFlavor.CUSTOM, level, lifts=lifts
    )


def wedge_basis(length: int, i: int) -> list[tuple[int, ...]]:
    return list(combinations(range(length), i))


@dataclass
class KoszulComplex:
    sequence: Sequence
    wedges: list[list[tuple[int, ...]]]
    # differentials[i][J'][J]: coefficient of e_J in d(e_J') for d: K_i -> K_(i-1)
    differentials: dict[int, list[list[TruncatedSeries]]]

    @property
    def length(self) -> int:
        return len(self.sequence)

    def rank(self, i: int) -> int:
        return len(self.wedges[i]) if 0 <= i <= self.length else 0

    def is_complex(self) -> bool:
        """d_(i-1) d_i = 0 as matrices over the truncated algebra."""
        for i in range(2, self.length + 1):
            upper, lower = self.differentials[i], self.differentials[i - 1]
            for row in upper:
                for col in range(self.rank(i - 2)):
                    total = None
                    for mid, entry in enumerate(row):
                        term = series_mul(entry, lower[mid][col])
                        total = term if total is None else total + term
                    if total is not None and not total.is_zero():
                        return False
        return True


def koszul_complex(x: Sequence) -> KoszulComplex:
    """Koszul complex of x over Lambda, of length L = len(x).

    L must lie between 1 and r + 1: the omega and nu sequences have length
    r + 1 (the p-adic element followed by T_1..T_r), their primed variants
    length r. Anything longer raises ParameterError.
    """
    L = len(x)
    if L < 1 or L > x.algebra.r + 1:
        raise ParameterError(
            f"sequence length {L} must lie between 1 and {x.algebra.r + 1}"
        )
    for f in x.elements:
        x.algebra.check(f)
    wedges = [wedge_basis(L, i) for i in range(L + 1)]
    zero = x.algebra.constant(0)
    differentials: dict[int, list[list[TruncatedSeries]]] = {}
    for i in range(1, L + 1):
        index = {J: k for k, J in enumerate(wedges[i - 1])}
        matrix = []
        for J in wedges[i]:
            row = [zero] * len(wedges[i - 1])
            for s, j in enumerate(J):
                face = J[:s] + J[s + 1 :]
                entry = x.elements[j]
                row[index[face]] = -entry if s % 2 else entry
            matrix.append(row)
        differentials[i] = matrix
    return KoszulComplex(x, wedges, differentials)


# ---------------------------------------------------------------------------
# cohomology of Hom(K(x), X)
# ---------------------------------------------------------------------------


@dataclass
class _HomComplex:
    complex: KoszulComplex
    module: ModulePresentation
    _actions: dict[int, IntMatrix] = field(default_factory=dict)

    def dim(self, i: int) -> int:
        return self.complex.rank(i) * self.module.flat_dim

    def relations(self, i: int) -> IntMatrix:
        rows = self.module.relation_rows
        width = self.module.flat_dim
        copies = self.complex.rank(i)
        out: IntMatrix = []
        for k in range(copies):
            for row in rows:
                out.append([0] * (k * width) + list(row) + [0] * ((copies - k - 1) * width))
        return out

    def _action(self, j: int) -> IntMatrix:
        if j not in self._actions:
            self._actions[j] = self.module.action_matrix(self.complex.sequence.elements[j])
        return self._actions[j]

    def differential(self, i: int) -> IntMatrix:
        """delta^i: Hom(K_i, X) -> Hom(K_(i+1), X) on flattened row vectors."""
        width = self.module.flat_dim
        mod = self.module.ring.modulus
        lower = self.complex.wedges[i]
        upper = self.complex.wedges[i + 1]
        index = {J: k for k, J in enumerate(lower)}
        A = [[0] * (len(upper) * width) for _ in range(len(lower) * width)]
        for col, J_up in enumerate(upper):
            for s, j in enumerate(J_up):
                face = J_up[:s] + J_up[s + 1 :]
                sign = -1 if s % 2 else 1
                block = self._action(j)
                r0, c0 = index[face] * width, col * width
                for a in range(width):
                    src = block[a]
                    dst = A[r0 + a]
                    for b in range(width):
                        if src[b]:
                            dst[c0 + b] = (dst[c0 + b] + sign * src[b]) % mod
        return A

    def spans(self, i: int) -> tuple[IntMatrix, IntMatrix]:
        """(boundaries, cocycles) in Hom(K_i, X) as generating rows."""
        ring = self.module.ring
        L = self.complex.length
        boundaries = self.relations(i)
        if i > 0:
            boundaries = boundaries + self.differential(i - 1)
        if i < L:
            cocycles = preimage(
                self.differential(i), self.relations(i + 1), ring, self.dim(i), self.dim(i + 1)
            )
        else:
            cocycles = _identity(self.dim(i))
        return boundaries, cocycles

    def raw(self, i: int) -> list[int]:
        boundaries, cocycles = self.spans(i)
        return quotient_invariants(boundaries, cocycles, self.module.ring, self.dim(i))


def annihilator_exponents(X: ModulePresentation) -> tuple[int, int]:
    """(a, b): least a with p^a X = 0 and least b with T_i^b X = 0 for every i."""
    invariants = X.invariants()
    a = max(invariants, default=0)
    return a, _least_power(X, X.relation_rows, X.relation_span_log)


def _least_power(X: ModulePresentation, base: IntMatrix, base_log: int) -> int:
    """Least b with T_i^b X inside the span of `base` for every variable."""
    algebra = X.algebra
    for b in range(algebra.D + 1):
        if all(
            X.contains(base, base_log, X.action_matrix(series_pow(algebra.variable(i), b)))
            for i in range(algebra.r)
        ):
            return b
    return algebra.D


def safety_margin(X: ModulePresentation, n: int) -> bool:
    """Finite-mode certification: a + n <= N, b p^n <= D, a < N and b < D."""
    a, b = annihilator_exponents(X)
    N, D, p = X.algebra.N, X.algebra.D, X.algebra.p
    return a + n <= N and b * p**n <= D and a < N and b < D


def lattice_faithful(X: ModulePresentation) -> bool:
    """T^b X in pX for b with r (b N - 1) + 1 <= D, so truncation loses nothing mod p^N."""
    N, D, r = X.algebra.N, X.algebra.D, X.algebra.r
    base = X.relation_rows + _identity(X.flat_dim, X.algebra.p)
    base_log = span_size_log(base, X.ring, X.flat_dim)
    b = _least_power(X, base, base_log)
    return b > 0 and r * (b * N - 1) + 1 <= D


def _multiset_difference(whole: list[int], part: list[int]) -> list[int] | None:
    rest = list(whole)
    for e in part:
        if e not in rest:
            return None
        rest.remove(e)
    return rest


def koszul_cohomology_all(x: Sequence, X: ModulePresentation, start: int = 0) -> dict[int, CohomologyGroup]:
    """H^i(x, X) for every i >= start."""
    if x.algebra != X.algebra:
        raise RingMismatchError("sequence and module live over different algebras")
    complex_ = koszul_complex(x)
    L = complex_.length
    p, N = X.algebra.p, X.algebra.N
    if X.is_zero():
        return {i: CohomologyGroup(p) for i in range(start, L + 1)}
    hom = _HomComplex(complex_, X)
    invariants = X.invariants()

    if max(invariants) < N:
        if not safety_margin(X, x.level):
            raise PrecisionExhaustedError(
                f"module is not certified at level {x.level} with N={N}, D={X.algebra.D}",
                stage="koszul",
            )
        return {i: CohomologyGroup(p, tuple(hom.raw(i))) for i in range(start, L + 1)}

    if min(invariants) < N:
        raise PrecisionExhaustedError(
            "module mixes torsion and a free Z/p^N part at this precision", stage="koszul"
        )
    if not lattice_faithful(X):
        raise PrecisionExhaustedError(
            f"degree cap D={X.algebra.D} does not capture the lattice module mod p^{N}",
            stage="koszul",
        )
    PrintStyle.debug(f"Koszul cohomology in lattice mode, rank {len(invariants)} over Z/{p}^{N}")
    # universal coefficients: raw^i = H^i / p^N + H^(i+1)[p^N], peeled from the top
    result: dict[int, CohomologyGroup] = {}
    above: list[int] = []
    for i in range(L, start - 1, -1):
        raw = hom.raw(i)
        corrected = _multiset_difference(raw, above)
        if corrected is None or any(e >= N for e in corrected):
            raise PrecisionExhaustedError(
                f"H^{i} is not determined below p^{N}", stage="koszul"
            )
        result[i] = CohomologyGroup(p, tuple(corrected))
        above = corrected
    return dict(sorted(result.items()))


def koszul_cohomology(x: Sequence, X: ModulePresentation, i: int) -> CohomologyGroup:
    if not 0 <= i <= len(x):
        raise ParameterError(f"degree {i} outside 0..{len(x)}")
    return koszul_cohomology_all(x, X, start=i)[i]


@dataclass
class ExactSequenceCheck:
    left: int
    middle: int
    right: int
    ok: bool


def exact_sequence_check(x_n: Sequence, x_prime_n: Sequence, X: ModulePresentation, i: int) -> ExactSequenceCheck:
    """Cardinalities in 0 -> H^(i-1)(x')/p^n -> H^i(x) -> H^i(x')[p^n] -> 0."""
    n = x_n.level
    algebra = X.algebra
    head = x_n.elements[0]
    if (
        len(x_n) != len(x_prime_n) + 1
        or head != algebra.constant(algebra.p**n)
        or any(a != b for a, b in zip(x_n.elements[1:], x_prime_n.elements))
    ):
        raise ParameterError("x_n must be p^n followed by x'_n")
    L = len(x_prime_n)
    left = (
        koszul_cohomology(x_prime_n, X, i - 1).cotorsion(n).order
        if 1 <= i <= L + 1
        else 1
    )
    right = koszul_cohomology(x_prime_n, X, i).torsion(n).order if 0 <= i <= L else 1
    middle = koszul_cohomology(x_n, X, i).order if 0 <= i <= L + 1 else 1
    return ExactSequenceCheck(left, middle, right, middle == left * right)


# ---------------------------------------------------------------------------
# direct systems and the adjoint
# ---------------------------------------------------------------------------


def _sympy_poly(poly: Polynomial, gens: list[sympy.Symbol]) -> sympy.Poly:
    expr = sum(
        (c * prod(g**k for g, k in zip(gens, e)) for e, c in poly.items()),
        sympy.Integer(0),
    )
    return sympy.Poly(expr, *gens, domain="QQ")


def _exact_quotient(big: Polynomial, small: Polynomial, algebra: TruncAlgebra) -> TruncatedSeries:
    gens = list(sympy.symbols(f"T1:{algebra.r + 1}"))
    q, rem = _sympy_poly(big, gens).div(_sympy_poly(small, gens))
    if not rem.is_zero:
        raise ParameterError("sequence element does not divide its successor")
    coeffs = {
        tuple(e): reduce_fraction(Fraction(int(c.p), int(c.q)), algebra.ring)
        for e, c in q.terms()
    }
    return algebra.series(coeffs)


def transition_ratios(seq_n: Sequence, seq_m: Sequence) -> list[TruncatedSeries]:
    """y_j with x_(m,j) = y_j x_(n,j)."""
    if len(seq_n) != len(seq_m) or seq_n.algebra != seq_m.algebra:
        raise ParameterError("sequences of a direct system must share shape")
    algebra = seq_n.algebra
    if seq_n.flavor is SequenceFlavor.CUSTOM or seq_m.flavor is SequenceFlavor.CUSTOM:
        if seq_n.lifts is None or seq_m.lifts is None:
            raise ParameterError("custom transitions need integer lifts of both sequences")
        return [_exact_quotient(b, a, algebra) for a, b in zip(seq_n.lifts, seq_m.lifts)]
    if seq_n.flavor != seq_m.flavor or seq_n.primed != seq_m.primed:
        raise ParameterError("direct system mixes sequence flavors")
    n, m = seq_n.level, seq_m.level
    if m < n:
        raise ParameterError(f"target level {m} is below source level {n}")
    ratios = [
        nu_ratio_series(algebra.ring, algebra.r, algebra.D, m, n, i) for i in range(algebra.r)
    ]
    if not seq_n.primed:
        ratios.insert(0, algebra.constant(algebra.p ** (m - n)))
    return ratios


def transition_map(seq_n: Sequence, seq_m: Sequence, i: int) -> list[TruncatedSeries]:
    """Multiplier on each e_J component of Hom(K_i, X), J in lexicographic order."""
    ratios = transition_ratios(seq_n, seq_m)
    algebra = seq_n.algebra
    out = []
    for J in wedge_basis(len(ratios), i):
        multiplier = algebra.constant(1)
        for j in J:
            multiplier = series_mul(multiplier, ratios[j])
        out.append(multiplier)
    return out


def flatten_transition(X: ModulePresentation, multipliers: list[TruncatedSeries]) -> IntMatrix:
    width = X.flat_dim
    rows: IntMatrix = []
    for k, f in enumerate(multipliers):
        for row in X.action_matrix(f):
            rows.append([0] * (k * width) + row + [0] * ((len(multipliers) - k - 1) * width))
    return rows


class AdjointStatus(str, Enum):
    STABLE = "STABLE"
    INDETERMINATE = "INDETERMINATE"


@dataclass
class AdjointEstimate:
    status: AdjointStatus
    group: CohomologyGroup | None = None
    level: int | None = None
    top_orders: dict[int, int] = field(default_factory=dict)


def adjoint_E(
    X: ModulePresentation,
    level: int = 1,
    max_level: int = 4,
    flavor: SequenceFlavor = SequenceFlavor.OMEGA,
) -> AdjointEstimate:
    """Estimate E(X), the dual of the direct limit of H^r(x'_n, X)[p^N].

    The top groups are computed with extra precision and degree headroom; a
    group that still grows when both are raised is not finite. The limit is
    read off once the images T_n -> T_(n+1), T_n -> T_(n+2) and
    T_(n+1) -> T_(n+2) all have the same size.
    """
    if flavor is SequenceFlavor.CUSTOM:
        raise ParameterError("the adjoint is defined through the omega or nu families")
    if max_level < level + 2:
        raise ParameterError(f"need max_level >= level + 2, got {level}..{max_level}")
    N = X.algebra.N
    headroom = max_level + 1
    work = X.at(N + headroom, X.algebra.D + headroom)
    check = X.at(N + headroom + 1, X.algebra.D + headroom + 1)
    primed = omega_prime_sequence if flavor is SequenceFlavor.OMEGA else nu_prime_sequence
    r = X.algebra.r

    def top(module: ModulePresentation, n: int) -> IntMatrix:
        boundaries, _ = _HomComplex(koszul_complex(primed(module.algebra, n)), module).spans(r)
        return boundaries

    estimate = AdjointEstimate(AdjointStatus.INDETERMINATE)
    boundaries: dict[int, IntMatrix] = {}
    torsion: dict[int, IntMatrix] = {}
    width = work.flat_dim
    ring = work.ring
    for n in range(level, max_level + 1):
        B = top(work, n)
        B_check = top(check, n)
        order = width * ring.N - span_size_log(B, ring, width)
        order_check = check.flat_dim * check.ring.N - span_size_log(B_check, check.ring, check.flat_dim)
        if order != order_check:
            raise NotFiniteError(f"H^{r}(x'_{n}, X) keeps growing with the truncation")
        estimate.top_orders[n] = order
        boundaries[n] = B
        torsion[n] = preimage(_identity(width, X.algebra.p**N), B, ring, width, width)

    def image(n: int, m: int) -> IntMatrix:
        multipliers = transition_map(primed(work.algebra, n), primed(work.algebra, m), r)
        return image_rows(torsion[n], flatten_transition(work, multipliers), ring)

    def image_log(n: int, m: int) -> int:
        B = boundaries[m]
        return span_size_log(B + image(n, m), ring, width) - span_size_log(B, ring, width)

    for n in range(level, max_level - 1):
        sizes = {image_log(n, n + 1), image_log(n, n + 2), image_log(n + 1, n + 2)}
        if len(sizes) == 1:
            B = boundaries[n + 2]
            exponents = quotient_invariants(B, B + image(n + 1, n + 2), ring, width)
            estimate.status = AdjointStatus.STABLE
            estimate.group = CohomologyGroup(X.algebra.p, tuple(exponents))
            estimate.level = n
            return estimate
    PrintStyle.warning(f"direct limit did not stabilize by level {max_level}")
    return estimate


# ---------------------------------------------------------------------------
# Ext and pseudo-nullity
# ---------------------------------------------------------------------------


def ext1_elementary(f: TruncatedSeries) -> CohomologyGroup:
    """Ext^1(Lambda/(f), Lambda) = coker of the dual of multiplication by f."""
    if f.is_zero():
        raise ParameterError("Ext^1 of Lambda/(0) is not elementary torsion")
    M = multiplication_matrix(f)
    dim = len(M)
    dual = [[M[j][i] for j in range(dim)] for i in range(dim)]
    return CohomologyGroup(
        f.ring.p, tuple(quotient_invariants(dual, _identity(dim), f.ring, dim))
    )


def quotient_group(f: TruncatedSeries) -> CohomologyGroup:
    """Lambda_trunc / (f) as an abelian group."""
    M = multiplication_matrix(f)
    dim = len(M)
    return CohomologyGroup(f.ring.p, tuple(quotient_invariants(M, _identity(dim), f.ring, dim)))


def _dual_differentials(
    relations: list[Polynomial], algebra: TruncAlgebra
) -> tuple[IntMatrix, IntMatrix]:
    """Hom(-, Lambda) applied to Lambda^(pairs) -> Lambda^s -> Lambda.

    The first map is the Koszul syzygy f_j e_i - f_i e_j per pair i < j, so
    d0 sends a to (a f_1, ..., a f_s) and d1 sends (phi_i) to
    (f_j phi_i - f_i phi_j) over the pairs.
    """
    mod = algebra.ring.modulus
    dim, s = algebra.dim, len(relations)
    mats = [multiplication_matrix(algebra.series(f)) for f in relations]
    pairs = list(combinations(range(s), 2))
    d0 = [[x for M in mats for x in M[a]] for a in range(dim)]
    d1: IntMatrix = []
    for i in range(s):
        for a in range(dim):
            row: list[int] = []
            for k, l in pairs:
                if i == k:
                    row.extend(mats[l][a])
                elif i == l:
                    row.extend((-x) % mod for x in mats[k][a])
                else:
                    row.extend([0] * dim)
            d1.append(row)
    return d0, d1


def ext1_truncated(X: ModulePresentation) -> CohomologyGroup:
    """Image of Ext^1(X, Lambda) in the cohomology of the dual presentation.

    X must be cyclic. Cocycles are taken at a finer truncation, with headroom
    for the degree and p-adic valuation of the relations, and pushed down to
    the working one, so classes that only exist because products fell off
    the truncation are discarded. The Koszul syzygies may not generate every
    syzygy, which only enlarges the result: a zero group certifies
    Ext^1(X, Lambda) = 0 at this truncation.
    """
    if X.generators != 1:
        raise ParameterError(
            f"Ext^1 at truncation needs a cyclic presentation, got {X.generators} generators"
        )
    algebra = X.algebra
    p = algebra.p
    relations = [rel[0] for rel in X.relations if rel[0]]
    if not relations:
        return CohomologyGroup(p)
    degree = max(sum(e) for f in relations for e in f)
    valuation = max(sympy.multiplicity(p, abs(c)) for f in relations for c in f.values())
    fine = algebra.at(algebra.N + valuation + 1, algebra.D + degree + 1)

    s = len(relations)
    d0, _ = _dual_differentials(relations, algebra)
    _, d1_fine = _dual_differentials(relations, fine)
    if s > 1:
        pairs = s * (s - 1) // 2
        cocycles = row_kernel(d1_fine, fine.ring, s * fine.dim, pairs * fine.dim)
    else:
        cocycles = _identity(s * fine.dim)

    index = monomial_index(algebra.r, algebra.D)
    mod = algebra.ring.modulus
    pushed: IntMatrix = []
    for v in cocycles:
        row = [0] * (s * algebra.dim)
        for i in range(s):
            for e, x in zip(fine.basis, v[i * fine.dim : (i + 1) * fine.dim]):
                if x and e in index:
                    row[i * algebra.dim + index[e]] = x % mod
        pushed.append(row)
    cols = s * algebra.dim
    return CohomologyGroup(p, tuple(quotient_invariants(d0, d0 + pushed, algebra.ring, cols)))


class PseudoNullity(str, Enum):
    PSEUDO_NULL = "PSEUDO_NULL"
    NOT_PSEUDO_NULL = "NOT_PSEUDO_NULL"
    INDETERMINATE = "INDETERMINATE"


def _maximal_minors(X: ModulePresentation, gens: list[sympy.Symbol]) -> list[sympy.Poly]:
    g = X.generators
    matrix = [
        [_sympy_poly(f, gens).as_expr() for f in rel] for rel in X.relations
    ]
    minors = []
    for rows in combinations(range(len(matrix)), g):
        det = sympy.Matrix([matrix[k] for k in rows]).det(method="berkowitz")
        poly = sympy.Poly(sympy.expand(det), *gens, domain="ZZ")
        if not poly.is_zero:
            minors.append(poly)
    return minors


def _monomial_split(poly: sympy.Poly, p: int) -> tuple[int, tuple[int, ...], bool]:
    """(a, e, unit) with poly = p^a T^e u; unit tells whether u(0) is prime to p."""
    content = int(poly.content())
    a = 0
    while content % p == 0:
        content //= p
        a += 1
    monoms = poly.monoms()
    e = tuple(min(m[i] for m in monoms) for i in range(len(poly.gens)))
    constant = int(poly.coeff_monomial(tuple(e))) // p**a
    return a, e, constant % p != 0


def _coprime_certificate(f: sympy.Poly, h: sympy.Poly, p: int) -> bool:
    """f = unit * p^a T^e and h shares none of the primes p, T_i dividing f."""
    a, e, unit = _monomial_split(f, p)
    if not unit or (a == 0 and not any(e)):
        return False
    if a and all(int(c) % p == 0 for c in h.coeffs()):
        return False
    for i, k in enumerate(e):
        if k and sympy.Poly(h.as_expr().subs(h.gens[i], 0), *h.gens, domain="ZZ").is_zero:
            return False
    return True


def pseudo_null_test(
    X: ModulePresentation, elementary: Seq[TruncatedSeries] | None = None
) -> PseudoNullity:
    """Three-valued pseudo-nullity.

    With a declared elementary decomposition the answer is exact: a sum of
    Lambda/(f_i) is pseudo-null only when every f_i is a unit. Otherwise the
    maximal minors of the relation matrix are inspected: vanishing minors
    mean X is not torsion and a common non-unit factor means the support has
    a height-one component. A torsion cyclic X is then certified when
    ext1_truncated vanishes; failing that, a finite quotient by the minors or
    a coprime pair (one of them a monomial in p and the T_i) certifies
    height two.
    """
    p = X.algebra.p
    if elementary is not None:
        for f in elementary:
            X.algebra.check(f)
            if not f.is_unit():
                return PseudoNullity.NOT_PSEUDO_NULL
        return PseudoNullity.PSEUDO_NULL

    if X.generators == 0 or X.is_zero():
        return PseudoNullity.PSEUDO_NULL
    gens = list(sympy.symbols(f"T1:{X.algebra.r + 1}"))
    minors = _maximal_minors(X, gens)
    if not minors:
        return PseudoNullity.NOT_PSEUDO_NULL

    common = minors[0]
    for poly in minors[1:]:
        common = common.gcd(poly)
    content, primitive = common.primitive()
    if int(content) % p == 0:
        return PseudoNullity.NOT_PSEUDO_NULL
    if int(primitive.coeff_monomial((0,) * X.algebra.r)) % p == 0:
        return PseudoNullity.NOT_PSEUDO_NULL

    if X.generators == 1 and ext1_truncated(X).is_zero():
        return PseudoNullity.PSEUDO_NULL

    fitting = ModulePresentation.cyclic(
        X.algebra, [_polynomial_from_sympy(poly) for poly in minors]
    )
    a, b = annihilator_exponents(fitting)
    if a < X.algebra.N and b < X.algebra.D:
        return PseudoNullity.PSEUDO_NULL
    for f in minors:
        for h in minors:
            if f is not h and _coprime_certificate(f, h, p):
                return PseudoNullity.PSEUDO_NULL
    return PseudoNullity.INDETERMINATE


def _polynomial_from_sympy(poly: sympy.Poly) -> Polynomial:
    return {tuple(e): int(c) for e, c in poly.terms()}


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------


@dataclass
class Lattice:
    """Sublattice H of Z^r spanned by the rows of `basis`."""

    basis: list[list[int]]

    def __post_init__(self):
        r = len(self.basis)
        if r == 0 or any(len(row) != r for row in self.basis):
            raise ParameterError("lattice basis must be a non-empty square matrix")
        if sympy.Matrix(self.basis).det() == 0:
            raise ParameterError("lattice basis is singular")

    @property
    def r(self) -> int:
        return len(self.basis)


@dataclass
class LatticeInvariants:
    index: int
    exponent: int
    e: int


def _p_part(x: int, p: int) -> int:
    x = abs(x)
    out = 1
    while x % p == 0:
        x //= p
        out *= p
    return out


def lattice_e(H: Lattice, p: int) -> LatticeInvariants:
    """p-parts of [Z^r : H], the exponent of Z^r / H and their quotient."""
    parts = sorted(_p_part(d, p) for d in smith_form(H.basis).diagonal)
    return LatticeInvariants(
        index=prod(parts), exponent=parts[-1], e=prod(parts[:-1])
    )


def lattice_quotient_size_bruteforce(basis: Seq[Seq[int]], modulus: int) -> int:
    """|(Z/modulus)^r / span(basis)| by closing the span under addition."""
    r = len(basis)
    gens = [tuple(x % modulus for x in row) for row in basis]
    seen = {(0,) * r}
    frontier = [(0,) * r]
    while frontier:
        v = frontier.pop()
        for g in gens:
            w = tuple((a + b) % modulus for a, b in zip(v, g))
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return modulus**r // len(seen)
