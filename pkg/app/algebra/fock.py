"""
Fock space of the βγ-bc system on V = C^N.

Monomials are canonical words of creation modes applied to the vacuum. The
weight-zero boson γ_(-1) never sits in the word: its exponents live in
``gamma_poly`` and are only allowed on FULL states.
"""
from __future__ import annotations

import bisect
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from fractions import Fraction
from functools import cached_property, lru_cache
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple, Union

from sympy import ZZ
from sympy.polys.rings import ring

from app.config import settings
from app.utils.utils import FlavorError, GradeError, TextFormError, text_forms

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]
Terms = Dict["Monomial", Scalar]


class Species(IntEnum):
    BETA = 0
    GAMMA = 1
    B = 2
    C = 3

    @property
    def is_odd(self) -> bool:
        return self >= Species.B

    @property
    def weight(self) -> int:
        """Conformal weight of the generating field (β, b: 1; γ, c: 0)"""
        return 1 if self in (Species.BETA, Species.B) else 0

    @property
    def charge(self) -> int:
        return {Species.B: -1, Species.C: 1}.get(self, 0)

    @property
    def partner(self) -> "Species":
        return Species(self ^ 1)

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {Species.BETA: "beta", Species.GAMMA: "gamma", Species.B: "b", Species.C: "c"}
_SPECIES_BY_LABEL = {label: species for species, label in _LABELS.items()}

# [X_(m), partner_(-m-1)} for an annihilating X
_BRACKET = {Species.BETA: 1, Species.GAMMA: -1, Species.B: 1, Species.C: 1}


class Flavor(str, Enum):
    PLUS = "plus"
    FULL = "full"


class Homogeneity(Enum):
    NON_HOMOGENEOUS = "non-homogeneous"


NON_HOMOGENEOUS = Homogeneity.NON_HOMOGENEOUS


class Grade(NamedTuple):
    k: int
    l: int


class ModeSymbol(NamedTuple):
    species: Species
    direction: int
    mode: int

    @property
    def shift(self) -> int:
        """Weight added when this mode acts"""
        return self.species.weight - self.mode - 1

    @property
    def is_creation(self) -> bool:
        return self.mode < 0

    @property
    def text(self) -> str:
        return f"{self.species.label}{{{self.direction},{self.mode}}}"


@dataclass(frozen=True, order=True)
class Monomial:
    word: Tuple[ModeSymbol, ...]
    gamma_poly: Tuple[int, ...]

    @classmethod
    def vacuum(cls, N: int) -> "Monomial":
        return _vacuum(N)

    @property
    def N(self) -> int:
        return len(self.gamma_poly)

    @cached_property
    def weight(self) -> int:
        return sum(symbol.shift for symbol in self.word)

    @cached_property
    def charge(self) -> int:
        return sum(symbol.species.charge for symbol in self.word)

    @cached_property
    def parity(self) -> int:
        return sum(1 for symbol in self.word if symbol.species.is_odd) % 2

    @property
    def grade(self) -> Grade:
        return Grade(self.weight, self.charge)

    @property
    def is_plus(self) -> bool:
        return not any(self.gamma_poly)

    @property
    def gamma_degree(self) -> int:
        return sum(self.gamma_poly)

    @property
    def text(self) -> str:
        tokens = [symbol.text for symbol in self.word]
        if not self.is_plus:
            tokens.append("g[" + ",".join(str(e) for e in self.gamma_poly) + "]")
        return " ".join(tokens) if tokens else "1"

    @classmethod
    def from_text(cls, text: str, N: int) -> "Monomial":
        """Parse the canonical text form; even modes may come in any order"""
        modes, gamma_poly = text_forms.split_monomial(text)
        if gamma_poly is None:
            gamma_poly = (0,) * N
        if len(gamma_poly) != N:
            raise TextFormError(f"Gamma polynomial {list(gamma_poly)} does not have N={N} entries")

        mono = Monomial((), tuple(gamma_poly))
        for label, direction, mode in reversed(modes):
            symbol = ModeSymbol(_SPECIES_BY_LABEL[label], direction, mode)
            if not 1 <= direction <= N:
                raise TextFormError(f"Direction {direction} out of range 1..{N} in: {text}")
            if mode >= 0 or (symbol.species is Species.GAMMA and mode == -1):
                raise TextFormError(f"{symbol.text} is not a word creation mode")
            created = _create(symbol, mono)
            if created is None:
                raise TextFormError(f"Fermionic mode {symbol.text} repeated in: {text}")
            if created[0] != 1:
                raise TextFormError(f"Odd modes are not in canonical order in: {text}")
            mono = created[1]
        return mono

    def __repr__(self) -> str:
        return f"Monomial({self.text!r})"


@lru_cache(maxsize=settings.cache_size)
def _vacuum(N: int) -> Monomial:
    return Monomial((), (0,) * N)


def _odd_before(word: Tuple[ModeSymbol, ...], index: int) -> int:
    return sum(1 for symbol in word[:index] if symbol.species.is_odd)


def _create(symbol: ModeSymbol, mono: Monomial) -> Optional[Tuple[int, Monomial]]:
    """Multiply a creation mode onto a monomial from the left; None when it vanishes"""
    if symbol.species is Species.GAMMA and symbol.mode == -1:
        poly = list(mono.gamma_poly)
        poly[symbol.direction - 1] += 1
        return 1, Monomial(mono.word, tuple(poly))

    index = bisect.bisect_left(mono.word, symbol)
    if not symbol.species.is_odd:
        return 1, Monomial(mono.word[:index] + (symbol,) + mono.word[index:], mono.gamma_poly)

    if index < len(mono.word) and mono.word[index] == symbol:
        return None
    sign = -1 if _odd_before(mono.word, index) % 2 else 1
    return sign, Monomial(mono.word[:index] + (symbol,) + mono.word[index:], mono.gamma_poly)


def _annihilate(symbol: ModeSymbol, mono: Monomial) -> Optional[Tuple[int, Monomial]]:
    partner = ModeSymbol(symbol.species.partner, symbol.direction, -symbol.mode - 1)
    bracket = _BRACKET[symbol.species]

    if partner.species is Species.GAMMA and partner.mode == -1:
        exponent = mono.gamma_poly[symbol.direction - 1]
        if not exponent:
            return None
        poly = list(mono.gamma_poly)
        poly[symbol.direction - 1] -= 1
        return bracket * exponent, Monomial(mono.word, tuple(poly))

    index = bisect.bisect_left(mono.word, partner)
    if index == len(mono.word) or mono.word[index] != partner:
        return None
    if symbol.species.is_odd:
        sign = -1 if _odd_before(mono.word, index) % 2 else 1
        return bracket * sign, Monomial(mono.word[:index] + mono.word[index + 1:], mono.gamma_poly)

    count = bisect.bisect_right(mono.word, partner) - index
    return bracket * count, Monomial(mono.word[:index] + mono.word[index + 1:], mono.gamma_poly)


def mode_on_monomial(symbol: ModeSymbol, mono: Monomial) -> Optional[Tuple[int, Monomial]]:
    """A single mode acting on a monomial gives at most one monomial"""
    if symbol.is_creation:
        return _create(symbol, mono)
    return _annihilate(symbol, mono)


def _accumulate(out: Terms, terms: Mapping[Monomial, Scalar], scale: Scalar = 1) -> None:
    for mono, coefficient in terms.items():
        value = out.get(mono, 0) + scale * coefficient
        if value:
            out[mono] = value
        else:
            out.pop(mono, None)


@dataclass(frozen=True, eq=False)
class State:
    terms: Mapping[Monomial, Fraction]
    N: int
    flavor: Flavor = Flavor.PLUS

    def __post_init__(self):
        cleaned = {}
        for mono, coefficient in self.terms.items():
            if not coefficient:
                continue
            if mono.N != self.N:
                raise GradeError(f"Monomial {mono.text} does not live in dimension N={self.N}")
            if self.flavor is Flavor.PLUS and not mono.is_plus:
                raise FlavorError(f"gamma_(-1) factor in {mono.text} on a PLUS state")
            cleaned[mono] = Fraction(coefficient)
        object.__setattr__(self, "terms", MappingProxyType(cleaned))

    @classmethod
    def zero(cls, N: int, flavor: Flavor = Flavor.PLUS) -> "State":
        return cls({}, N, flavor)

    @classmethod
    def vacuum(cls, N: int, flavor: Flavor = Flavor.PLUS) -> "State":
        return cls({Monomial.vacuum(N): 1}, N, flavor)

    @classmethod
    def of(cls, mono: Monomial, flavor: Optional[Flavor] = None, coefficient: Scalar = 1) -> "State":
        if flavor is None:
            flavor = Flavor.PLUS if mono.is_plus else Flavor.FULL
        return cls({mono: coefficient}, mono.N, flavor)

    @classmethod
    def from_text(cls, text: str, N: int, flavor: Optional[Flavor] = None) -> "State":
        """Single monomial state from its text form"""
        return cls.of(Monomial.from_text(text, N), flavor)

    def _check_compatible(self, other: "State") -> Flavor:
        if self.N != other.N:
            raise GradeError(f"States of dimension {self.N} and {other.N} cannot be combined")
        if Flavor.FULL in (self.flavor, other.flavor):
            return Flavor.FULL
        return Flavor.PLUS

    def __add__(self, other: "State") -> "State":
        flavor = self._check_compatible(other)
        out = dict(self.terms)
        _accumulate(out, other.terms)
        return State(out, self.N, flavor)

    def __sub__(self, other: "State") -> "State":
        flavor = self._check_compatible(other)
        out = dict(self.terms)
        _accumulate(out, other.terms, -1)
        return State(out, self.N, flavor)

    def __neg__(self) -> "State":
        return State({m: -c for m, c in self.terms.items()}, self.N, self.flavor)

    def __mul__(self, scalar: Scalar) -> "State":
        return State({m: c * scalar for m, c in self.terms.items()}, self.N, self.flavor)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return self.N == other.N and dict(self.terms) == dict(other.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items()))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def grade(self) -> Union[Grade, Homogeneity]:
        grades = {mono.grade for mono in self.terms}
        if len(grades) == 1:
            return grades.pop()
        return NON_HOMOGENEOUS

    @property
    def is_homogeneous(self) -> bool:
        return self.is_zero or self.grade() is not NON_HOMOGENEOUS

    @property
    def gamma_degree(self) -> int:
        return max((mono.gamma_degree for mono in self.terms), default=0)

    def components(self) -> Dict[Grade, "State"]:
        """Homogeneous components keyed by grade"""
        parts: Dict[Grade, Dict[Monomial, Fraction]] = {}
        for mono, coefficient in self.terms.items():
            parts.setdefault(mono.grade, {})[mono] = coefficient
        return {grade: State(terms, self.N, self.flavor) for grade, terms in sorted(parts.items())}

    def to_flavor(self, flavor: Flavor) -> "State":
        return State(self.terms, self.N, flavor)

    @property
    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, coefficient in self:
            body = f"{text_forms.format_fraction(abs(coefficient))}*{mono.text}"
            if not parts:
                parts.append(body if coefficient > 0 else f"-{body}")
            else:
                parts.append(("+ " if coefficient > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"State({self.text!r}, N={self.N}, {self.flavor.value})"


def apply_mode(symbol: ModeSymbol, state: State) -> State:
    """Apply one generator mode (any integer mode) to a state"""
    if not 1 <= symbol.direction <= state.N:
        raise GradeError(f"Direction {symbol.direction} out of range 1..{state.N}")
    if state.flavor is Flavor.PLUS and symbol.species is Species.GAMMA and symbol.mode == -1:
        raise FlavorError("gamma_(-1) creation is not defined on PLUS states")

    out: Terms = {}
    for mono, coefficient in state.terms.items():
        result = mode_on_monomial(symbol, mono)
        if result is not None:
            _accumulate(out, {result[1]: result[0]}, coefficient)
    return State(out, state.N, state.flavor)


def alpha(direction: int, m: int) -> Tuple[int, ModeSymbol]:
    """α_(m) = -m γ_(m-1), returned as (coefficient, γ mode)"""
    return -m, ModeSymbol(Species.GAMMA, direction, m - 1)


def apply_alpha(direction: int, m: int, state: State) -> State:
    coefficient, symbol = alpha(direction, m)
    if coefficient == 0:
        return State.zero(state.N, state.flavor)
    return apply_mode(symbol, state) * coefficient


def translate_monomial(mono: Monomial) -> Terms:
    out: Terms = {}
    for index, symbol in enumerate(mono.word):
        sign = -1 if symbol.species.is_odd and _odd_before(mono.word, index) % 2 else 1
        rest = Monomial(mono.word[:index] + mono.word[index + 1:], mono.gamma_poly)
        raised = _create(ModeSymbol(symbol.species, symbol.direction, symbol.mode - 1), rest)
        if raised is not None:
            _accumulate(out, {raised[1]: raised[0]}, sign * -symbol.mode)

    for position, exponent in enumerate(mono.gamma_poly):
        if exponent:
            poly = list(mono.gamma_poly)
            poly[position] -= 1
            lowered = Monomial(mono.word, tuple(poly))
            _, raised = _create(ModeSymbol(Species.GAMMA, position + 1, -2), lowered)
            _accumulate(out, {raised: exponent})
    return out


def translate(state: State) -> State:
    """The derivation ∂ with ∂P_(-k) = k P_(-k-1)"""
    out: Terms = {}
    for mono, coefficient in state.terms.items():
        _accumulate(out, translate_monomial(mono), coefficient)
    return State(out, state.N, state.flavor)


def grade(state: State) -> Union[Grade, Homogeneity]:
    return state.grade()


def grade_range(N: int, k: int) -> range:
    """Charges that can occur at weight k"""
    return range(-k, N + k + 1)


def sw_degree(mono: Monomial) -> int:
    """Count of c plus twice the count of word γ modes"""
    return sum(
        2 if symbol.species is Species.GAMMA else 1
        for symbol in mono.word
        if symbol.species in (Species.GAMMA, Species.C)
    )


def top_component(state: State) -> State:
    """Part of the state of maximal SW-degree"""
    if state.is_zero:
        return state
    top = max(sw_degree(mono) for mono in state.terms)
    return State({m: c for m, c in state.terms.items() if sw_degree(m) == top}, state.N, state.flavor)


# ---------------------------------------------------------------------------
# Weight spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeightSpace:
    flavor: Flavor
    N: int
    k: int
    l: int
    basis: Tuple[Monomial, ...]
    gamma_degree_bound: Optional[int] = None
    index: Mapping[Monomial, int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", MappingProxyType({m: i for i, m in enumerate(self.basis)}))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def grade(self) -> Grade:
        return Grade(self.k, self.l)

    def __contains__(self, mono: Monomial) -> bool:
        return mono in self.index

    def coordinates(self, terms: Mapping[Monomial, Scalar]) -> Dict[int, Fraction]:
        """Coordinate vector of a combination of basis monomials"""
        vector = {}
        for mono, coefficient in terms.items():
            position = self.index.get(mono)
            if position is None:
                raise GradeError(
                    f"{mono.text} is not in the weight space (k={self.k}, l={self.l}, {self.flavor.value})"
                )
            vector[position] = Fraction(coefficient)
        return vector

    def state_of(self, vector: Mapping[int, Scalar]) -> State:
        return State({self.basis[i]: c for i, c in vector.items()}, self.N, self.flavor)

    def basis_state(self, position: int) -> State:
        return State({self.basis[position]: 1}, self.N, self.flavor)

    def basis_states(self) -> List[State]:
        return [self.basis_state(i) for i in range(self.dim)]


def _creation_symbols(N: int, k: int) -> Tuple[ModeSymbol, ...]:
    symbols = []
    for species in Species:
        for direction in range(1, N + 1):
            top = -2 if species is Species.GAMMA else -1
            for mode in range(-k - 1, top + 1):
                symbol = ModeSymbol(species, direction, mode)
                if symbol.shift <= k:
                    symbols.append(symbol)
    return tuple(sorted(symbols))


def _words(symbols: Tuple[ModeSymbol, ...], start: int, remaining: int) -> Iterator[Tuple[ModeSymbol, ...]]:
    if start == len(symbols):
        if remaining == 0:
            yield ()
        return
    symbol = symbols[start]
    shift = symbol.shift
    if symbol.species.is_odd:
        counts: Iterable[int] = (0, 1) if shift <= remaining else (0,)
    else:
        counts = range(remaining // shift + 1)
    for count in counts:
        for tail in _words(symbols, start + 1, remaining - count * shift):
            yield (symbol,) * count + tail


@lru_cache(maxsize=settings.cache_size)
def _words_by_charge(N: int, k: int) -> Mapping[int, Tuple[Tuple[ModeSymbol, ...], ...]]:
    by_charge: Dict[int, List[Tuple[ModeSymbol, ...]]] = {}
    for word in _words(_creation_symbols(N, k), 0, k):
        charge = sum(symbol.species.charge for symbol in word)
        by_charge.setdefault(charge, []).append(word)
    logger.debug("enumerated %d words at N=%d, k=%d", sum(map(len, by_charge.values())), N, k)
    return MappingProxyType({l: tuple(sorted(words)) for l, words in by_charge.items()})


def _gamma_exponents(N: int, bound: int) -> List[Tuple[int, ...]]:
    return [e for e in itertools.product(range(bound + 1), repeat=N) if sum(e) <= bound]


@lru_cache(maxsize=settings.cache_size)
def enumerate_basis(flavor: Flavor, N: int, k: int, l: int, gamma_degree_bound: Optional[int] = None) -> WeightSpace:
    """Every canonical monomial of grade (k, l), deterministically ordered"""
    flavor = Flavor(flavor)
    if N < 1:
        raise GradeError(f"Dimension N must be positive, got {N}")
    if k < 0:
        raise GradeError(f"Conformal weight must be non-negative, got k={k}")
    if flavor is Flavor.FULL and (gamma_degree_bound is None or gamma_degree_bound < 0):
        raise GradeError("FULL weight spaces need a non-negative gamma degree bound")
    if flavor is Flavor.PLUS:
        gamma_degree_bound = None

    words = _words_by_charge(N, k).get(l, ())
    if flavor is Flavor.PLUS:
        zero = (0,) * N
        basis = tuple(Monomial(word, zero) for word in words)
    else:
        exponents = _gamma_exponents(N, gamma_degree_bound)
        basis = tuple(sorted(Monomial(word, e) for word in words for e in exponents))
    return WeightSpace(flavor, N, k, l, basis, gamma_degree_bound)


def weight_space_or_empty(flavor: Flavor, N: int, k: int, l: int, gamma_degree_bound: Optional[int] = None) -> WeightSpace:
    """Like enumerate_basis but negative weights give the empty space"""
    if k < 0:
        return WeightSpace(Flavor(flavor), N, k, l, (), gamma_degree_bound)
    return enumerate_basis(flavor, N, k, l, gamma_degree_bound)


def _truncate(poly, k_max: int):
    return poly.ring.from_dict({m: c for m, c in poly.items() if m[0] <= k_max})


def product_character(N: int, k_max: int) -> Dict[Grade, int]:
    """
    Free-field character ∏(1+tq^{n-1})^N (1+t^{-1}q^n)^N (1-q^n)^{-2N}
    expanded through q^k_max, as a grade -> dimension table.
    """
    R, q, t, u = ring("q,t,u", ZZ)
    series = R.one
    for n in range(1, k_max + 2):
        series = _truncate(series * (1 + t * q ** (n - 1)) ** N, k_max)
    for n in range(1, k_max + 1):
        series = _truncate(series * (1 + u * q ** n) ** N, k_max)
        geometric = sum((q ** (n * j) for j in range(k_max // n + 1)), R.zero)
        for _ in range(2 * N):
            series = _truncate(series * geometric, k_max)

    table: Dict[Grade, int] = {}
    for (q_exp, t_exp, u_exp), coefficient in series.items():
        key = Grade(q_exp, t_exp - u_exp)
        table[key] = table.get(key, 0) + int(coefficient)
    return {key: table[key] for key in sorted(table) if table[key]}
