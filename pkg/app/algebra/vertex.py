"""
State-field correspondence for the βγ-bc system.

Every monomial state is turned into a field by peeling its leftmost factor:
Y(u_(-m-1)a, z) = :(1/m!)(∂^m u)(z) Y(a, z):, with normally ordered products
expanded as
    (:AB:)_(n) c = Σ_{j<0} A_(j) B_(n-j-1) c + (-1)^{|A||B|} Σ_{j>=0} B_(n-j-1) A_(j) c
and both sums cut off by the weight of c.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Dict, List, Mapping, Tuple

from sympy import binomial

from app.algebra.fock import (
    Flavor,
    Grade,
    ModeSymbol,
    Monomial,
    NON_HOMOGENEOUS,
    Scalar,
    Species,
    State,
    Terms,
    WeightSpace,
    _accumulate,
    apply_mode,
    mode_on_monomial,
    translate,
    weight_space_or_empty,
)
from app.algebra.linalg import SparseLinearMap
from app.algebra.vecfields import AlgebraType
from app.config import settings
from app.utils.utils import DimensionError, GradeError

logger = logging.getLogger(__name__)


class Field:
    """A vertex operator, evaluated mode by mode on monomials"""

    weight: int
    parity: int

    def on_monomial(self, n: int, mono: Monomial) -> Mapping[Monomial, Scalar]:
        raise NotImplementedError

    def on_terms(self, n: int, terms: Mapping[Monomial, Scalar]) -> Terms:
        out: Terms = {}
        for mono, coefficient in terms.items():
            result = self.on_monomial(n, mono)
            if result:
                _accumulate(out, result, coefficient)
        return out


@dataclass(frozen=True)
class IdentityField(Field):
    weight: int = field(default=0, init=False)
    parity: int = field(default=0, init=False)

    def on_monomial(self, n: int, mono: Monomial) -> Mapping[Monomial, Scalar]:
        return {mono: 1} if n == -1 else {}


def _remember(memo: Dict[Tuple[int, Monomial], Terms], key: Tuple[int, Monomial], value: Terms) -> None:
    # a full memo starts over rather than growing past the limit
    if len(memo) >= settings.field_memo_limit:
        memo.clear()
    memo[key] = value


@lru_cache(maxsize=settings.cache_size)
def generalized_binomial(top: int, bottom: int) -> int:
    return int(binomial(top, bottom))


@dataclass(frozen=True)
class GeneratorField(Field):
    """(1/m!) ∂^m u for a generator u; tilde drops γ_(-1)"""

    species: Species
    direction: int
    derivative: int = 0
    tilde: bool = False

    @property
    def weight(self) -> int:
        return self.species.weight + self.derivative

    @property
    def parity(self) -> int:
        return int(self.species.is_odd)

    def on_monomial(self, n: int, mono: Monomial) -> Mapping[Monomial, Scalar]:
        mode = n - self.derivative
        if self.tilde and self.species is Species.GAMMA and mode == -1:
            return {}
        coefficient = generalized_binomial(n, self.derivative)
        if coefficient == 0:
            return {}
        result = mode_on_monomial(ModeSymbol(self.species, self.direction, mode), mono)
        if result is None:
            return {}
        sign = -1 if self.derivative % 2 else 1
        return {result[1]: sign * coefficient * result[0]}


@dataclass(frozen=True)
class NormalOrderedField(Field):
    left: Field
    right: Field
    _memo: Dict[Tuple[int, Monomial], Terms] = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self):
        if getattr(self.left, "parity", 0) is None or getattr(self.right, "parity", 0) is None:
            raise GradeError("Normally ordered products need fields of definite parity")

    @property
    def weight(self) -> int:
        return self.left.weight + self.right.weight

    @property
    def parity(self) -> int:
        return (self.left.parity + self.right.parity) % 2

    def on_monomial(self, n: int, mono: Monomial) -> Mapping[Monomial, Scalar]:
        key = (n, mono)
        cached = self._memo.get(key)
        if cached is not None:
            return cached

        A, B = self.left, self.right
        w = mono.weight
        out: Terms = {}
        for j in range(n - w - B.weight, 0):
            inner = B.on_monomial(n - j - 1, mono)
            if inner:
                _accumulate(out, A.on_terms(j, inner))
        sign = -1 if A.parity and B.parity else 1
        for j in range(0, w + A.weight):
            inner = A.on_monomial(j, mono)
            if inner:
                _accumulate(out, B.on_terms(n - j - 1, inner), sign)

        _remember(self._memo, key, out)
        return out


@dataclass(frozen=True)
class LinearField(Field):
    terms: Tuple[Tuple[Fraction, Field], ...]
    _memo: Dict[Tuple[int, Monomial], Terms] = field(default_factory=dict, init=False, compare=False, repr=False)

    @property
    def weight(self) -> int:
        return max((f.weight for _, f in self.terms), default=0)

    @property
    def parity(self):
        parities = {f.parity for _, f in self.terms}
        if len(parities) > 1:
            return None
        return parities.pop() if parities else 0

    def on_monomial(self, n: int, mono: Monomial) -> Mapping[Monomial, Scalar]:
        key = (n, mono)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        out: Terms = {}
        for coefficient, f in self.terms:
            result = f.on_monomial(n, mono)
            if result:
                _accumulate(out, result, coefficient)
        _remember(self._memo, key, out)
        return out


def product_field(factors: List[Field]) -> Field:
    """Right-nested normally ordered product; the empty product is the identity"""
    if not factors:
        return IdentityField()
    return reduce(lambda acc, f: NormalOrderedField(f, acc), reversed(factors[:-1]), factors[-1])


@lru_cache(maxsize=settings.cache_size)
def state_field(mono: Monomial) -> Field:
    """Field of a single monomial state, built by peeling the leftmost factor"""
    position = next((i for i, e in enumerate(mono.gamma_poly) if e), None)
    if position is not None:
        poly = list(mono.gamma_poly)
        poly[position] -= 1
        head = GeneratorField(Species.GAMMA, position + 1)
        rest = state_field(Monomial(mono.word, tuple(poly)))
    elif mono.word:
        symbol = mono.word[0]
        head = GeneratorField(symbol.species, symbol.direction, -symbol.mode - 1)
        rest = state_field(Monomial(mono.word[1:], mono.gamma_poly))
    else:
        return IdentityField()
    if isinstance(rest, IdentityField):
        return head
    return NormalOrderedField(head, rest)


def field_of(state: State) -> Field:
    items = sorted(state.terms.items())
    if len(items) == 1 and items[0][1] == 1:
        return state_field(items[0][0])
    return LinearField(tuple((coefficient, state_field(mono)) for mono, coefficient in items))


def _product_flavor(a: State, b: State) -> Flavor:
    if a.N != b.N:
        raise GradeError(f"States of dimension {a.N} and {b.N} cannot be multiplied")
    return Flavor.FULL if Flavor.FULL in (a.flavor, b.flavor) else Flavor.PLUS


def nth_product(a: State, n: int, b: State) -> State:
    """a_(n) b for a homogeneous state a"""
    flavor = _product_flavor(a, b)
    if a.is_zero or b.is_zero:
        return State.zero(b.N, flavor)
    if a.grade() is NON_HOMOGENEOUS:
        raise GradeError("nth_product needs a homogeneous left argument; decompose it first")

    out: Terms = {}
    for mono, coefficient in a.terms.items():
        _accumulate(out, state_field(mono).on_terms(n, b.terms), coefficient)
    return State(out, b.N, flavor)


def normal_order(a: State, b: State) -> State:
    return nth_product(a, -1, b)


def composite_mode(a: State, n: int, ws: WeightSpace) -> SparseLinearMap:
    """Matrix of a_(n) from ws to the weight space it lands in"""
    target_grade = mode_target(a, n, ws)
    target = weight_space_or_empty(ws.flavor, ws.N, target_grade.k, target_grade.l, ws.gamma_degree_bound)
    if a.is_zero:
        return SparseLinearMap.from_columns(ws, target, ({} for _ in ws.basis))
    f = field_of(a)
    return SparseLinearMap.from_operator(ws, target, lambda mono: f.on_monomial(n, mono))


def composite_zero_mode(a: State, ws: WeightSpace) -> SparseLinearMap:
    return composite_mode(a, 0, ws)


def mode_target(a: State, n: int, ws: WeightSpace) -> Grade:
    grade = a.grade()
    if grade is NON_HOMOGENEOUS:
        if a.is_zero:
            return ws.grade
        raise GradeError("Composite modes need a homogeneous state")
    return Grade(ws.k + grade.k - n - 1, ws.l + grade.l)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

class GeneratorName(str, Enum):
    Q = "Q"
    L = "L"
    J = "J"
    G = "G"
    D = "D"
    E = "E"
    B = "B"
    C = "C"
    Dp = "Dp"
    Ep = "Ep"


TYPE_A_GENERATORS = (
    GeneratorName.Q, GeneratorName.L, GeneratorName.J, GeneratorName.G,
    GeneratorName.D, GeneratorName.E, GeneratorName.B, GeneratorName.C,
)
TYPE_C_GENERATORS = (
    GeneratorName.Q, GeneratorName.L, GeneratorName.J, GeneratorName.G,
    GeneratorName.Dp, GeneratorName.Ep,
)


def _single(species: Species, direction: int, mode: int, N: int) -> State:
    return apply_mode(ModeSymbol(species, direction, mode), State.vacuum(N))


def _total(states: List[State], N: int) -> State:
    return sum(states, State.zero(N))


@lru_cache(maxsize=settings.cache_size)
def generator_state(name: GeneratorName, N: int) -> State:
    """State of one of the generating fields, built with normal_order and nth_product"""
    name = GeneratorName(name)
    directions = range(1, N + 1)
    beta = {i: _single(Species.BETA, i, -1, N) for i in directions}
    dgamma = {i: _single(Species.GAMMA, i, -2, N) for i in directions}
    b = {i: _single(Species.B, i, -1, N) for i in directions}
    c = {i: _single(Species.C, i, -1, N) for i in directions}

    if name is GeneratorName.Q:
        return _total([normal_order(beta[i], c[i]) for i in directions], N)
    if name is GeneratorName.J:
        return -_total([normal_order(b[i], c[i]) for i in directions], N)
    if name is GeneratorName.L:
        return _total(
            [normal_order(beta[i], dgamma[i]) - normal_order(b[i], translate(c[i])) for i in directions], N
        )
    if name is GeneratorName.G:
        return _total([normal_order(b[i], dgamma[i]) for i in directions], N)
    if name is GeneratorName.D:
        return reduce(lambda acc, i: normal_order(b[i], acc), reversed(range(1, N)), b[N])
    if name is GeneratorName.E:
        return reduce(lambda acc, i: normal_order(c[i], acc), reversed(range(1, N)), c[N])
    if name is GeneratorName.B:
        return nth_product(generator_state(GeneratorName.Q, N), 0, generator_state(GeneratorName.D, N))
    if name is GeneratorName.C:
        return nth_product(generator_state(GeneratorName.G, N), 0, generator_state(GeneratorName.E, N))

    if N % 2:
        raise DimensionError(f"{name.value} requires an even dimension N (got N={N})")
    pairs = range(1, N // 2 + 1)
    if name is GeneratorName.Dp:
        return _total([normal_order(b[2 * i - 1], b[2 * i]) for i in pairs], N)
    return _total([normal_order(c[2 * i - 1], c[2 * i]) for i in pairs], N)


def generator_names(algebra: AlgebraType) -> Tuple[GeneratorName, ...]:
    return TYPE_C_GENERATORS if AlgebraType(algebra) is AlgebraType.C else TYPE_A_GENERATORS


def generator_grades(algebra: AlgebraType, N: int) -> Dict[GeneratorName, Grade]:
    return {name: generator_state(name, N).grade() for name in generator_names(algebra)}


def central_charge_experiment(N: int) -> Dict[str, Fraction]:
    """
    Reads the central charge of L from L_(3)L = (c/2)·1 and the anomaly d of J
    from J_(1)J = d·1. The untwisted N=2 algebra then has central charge 3d.
    """
    vacuum = Monomial.vacuum(N)
    L = generator_state(GeneratorName.L, N)
    J = generator_state(GeneratorName.J, N)
    twisted = 2 * nth_product(L, 3, L).terms.get(vacuum, Fraction(0))
    anomaly = nth_product(J, 1, J).terms.get(vacuum, Fraction(0))
    logger.info("central charge experiment at N=%d: twisted c=%s, J anomaly=%s", N, twisted, anomaly)
    return {"twisted_c": Fraction(twisted), "j_anomaly": Fraction(anomaly), "untwisted_c": 3 * Fraction(anomaly)}


def translation_matches_virasoro(state: State) -> bool:
    """∂ agrees with L_(0)"""
    return translate(state) == nth_product(generator_state(GeneratorName.L, state.N), 0, state)
