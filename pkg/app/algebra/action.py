"""
Actions of polynomial vector fields on the Fock space.

ℒ(v) is the zero mode of Σ_i Q_(0) :P_i(γ) b^i: and needs FULL states.
ℒ⁺(v) is built from γ̃ (γ without its (-1) mode) and preserves PLUS states:
    ℒ⁺(v) = Σ_{i,j} (::∂_j P_i(γ̃) c^j: b^i:)_(0) + Σ_i (:P_i(γ̃) β^i:)_(0)
The 𝔤₀[t] action on SW states and the K operators live here too.
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, List, Optional, Tuple

from app.algebra.fock import (
    Flavor,
    ModeSymbol,
    Monomial,
    Species,
    State,
    Terms,
    WeightSpace,
    _accumulate,
    _create,
    _odd_before,
    apply_mode,
)
from app.algebra.linalg import SparseLinearMap
from app.algebra.vecfields import MultiIndex, PolyVectorField, bracket
from app.algebra.vertex import (
    Field,
    GeneratorField,
    GeneratorName,
    IdentityField,
    LinearField,
    NormalOrderedField,
    field_of,
    generator_state,
    nth_product,
    product_field,
)
from app.config import settings
from app.utils.utils import DimensionError, FlavorError, FreeFieldError, GradeError, VectorFieldError

logger = logging.getLogger(__name__)


class Variant(str, Enum):
    L = "L"
    LPLUS = "L+"


def _gamma_monomial_field(s: MultiIndex, tilde: bool) -> Field:
    factors: List[Field] = []
    for direction, exponent in enumerate(s.exponents, start=1):
        factors.extend(GeneratorField(Species.GAMMA, direction, 0, tilde) for _ in range(exponent))
    return product_field(factors)


def polynomial_field(v: PolyVectorField, direction: int, tilde: bool) -> Optional[Field]:
    """Field of P_direction(γ) (or of P(γ̃)); None when the component vanishes"""
    terms = v.component_terms(direction)
    if not terms:
        return None
    if len(terms) == 1 and terms[0][1] == 1:
        return _gamma_monomial_field(terms[0][0], tilde)
    return LinearField(tuple((c, _gamma_monomial_field(s, tilde)) for s, c in terms))


def _times(left: Field, right: Field) -> Field:
    if isinstance(left, IdentityField):
        return right
    return NormalOrderedField(left, right)


def _lplus_field(v: PolyVectorField) -> Optional[Field]:
    N = v.N
    pieces: List[Tuple[Fraction, Field]] = []
    for i in range(1, N + 1):
        P = polynomial_field(v, i, tilde=True)
        if P is not None:
            pieces.append((Fraction(1), _times(P, GeneratorField(Species.BETA, i))))
        for j in range(1, N + 1):
            dP = polynomial_field(v.partial(MultiIndex.unit(j, N)), i, tilde=True)
            if dP is not None:
                inner = _times(dP, GeneratorField(Species.C, j))
                pieces.append((Fraction(1), NormalOrderedField(inner, GeneratorField(Species.B, i))))
    if not pieces:
        return None
    return LinearField(tuple(pieces))


def lie_state(v: PolyVectorField) -> State:
    """X_v = Σ_i Q_(0) :P_i(γ) b^i:, a FULL state of weight 1 and charge 0"""
    N = v.N
    Q = generator_state(GeneratorName.Q, N).to_flavor(Flavor.FULL)
    total = State.zero(N, Flavor.FULL)
    for i in range(1, N + 1):
        b_state = apply_mode(ModeSymbol(Species.B, i, -1), State.vacuum(N, Flavor.FULL))
        for s, coefficient in v.component_terms(i):
            term = b_state
            for direction, exponent in enumerate(s.exponents, start=1):
                for _ in range(exponent):
                    term = apply_mode(ModeSymbol(Species.GAMMA, direction, -1), term)
            total = total + nth_product(Q, 0, term) * coefficient
    return total


@dataclass(eq=False)
class ActionOperator:
    """Zero-mode operator ℒ(v) or ℒ⁺(v), materialized per weight space on demand"""

    vector_field: PolyVectorField
    variant: Variant
    _cache: Dict[Tuple[Flavor, int, int, Optional[int]], SparseLinearMap] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @cached_property
    def operator_field(self) -> Optional[Field]:
        if self.variant is Variant.L:
            X = lie_state(self.vector_field)
            return None if X.is_zero else field_of(X)
        return _lplus_field(self.vector_field)

    def on_monomial(self, mono: Monomial) -> Terms:
        f = self.operator_field
        return dict(f.on_monomial(0, mono)) if f is not None else {}

    def apply(self, state: State) -> State:
        if state.N != self.vector_field.N:
            raise GradeError(f"Operator on N={self.vector_field.N} applied to a state on N={state.N}")
        flavor = state.flavor
        if self.variant is Variant.L:
            flavor = Flavor.FULL
        f = self.operator_field
        terms = f.on_terms(0, state.terms) if f is not None else {}
        return State(terms, state.N, flavor)

    def matrix(self, ws: WeightSpace) -> SparseLinearMap:
        """Grade-preserving matrix on ws; GradeError if the image leaves ws"""
        if self.variant is Variant.L and ws.flavor is not Flavor.FULL:
            raise FlavorError("ℒ(v) acts on FULL weight spaces only")
        key = (ws.flavor, ws.k, ws.l, ws.gamma_degree_bound)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._cache.get(key)
            if cached is None:
                cached = SparseLinearMap.from_operator(ws, ws, self.on_monomial)
                self._cache[key] = cached
        return cached


@lru_cache(maxsize=settings.cache_size)
def _operator(N: int, text: str, variant: Variant) -> ActionOperator:
    return ActionOperator(PolyVectorField.from_text(text, N), variant)


def action_operator(v: PolyVectorField, variant: Variant) -> ActionOperator:
    """Shared operator instance per (field, variant)"""
    return _operator(v.N, v.text, Variant(variant))


def act_L(v: PolyVectorField, state: State) -> State:
    return action_operator(v, Variant.L).apply(state.to_flavor(Flavor.FULL))


def act_Lplus(v: PolyVectorField, state: State) -> State:
    if state.flavor is not Flavor.PLUS:
        raise FlavorError("act_Lplus takes PLUS states; use ActionOperator directly on FULL states")
    return action_operator(v, Variant.LPLUS).apply(state)


def _gamma_power(s: MultiIndex, state: State) -> State:
    for direction, exponent in enumerate(s.exponents, start=1):
        for _ in range(exponent):
            state = apply_mode(ModeSymbol(Species.GAMMA, direction, -1), state)
    return state


def _taylor(v: PolyVectorField, state: State, source: Variant, alternating: bool) -> State:
    N = v.N
    state = state.to_flavor(Flavor.FULL)
    total = State.zero(N, Flavor.FULL)
    for i in range(1, N + 1):
        Pi = v.only_direction(i)
        if Pi.is_zero:
            continue
        top = max(s.degree for s, _ in Pi.component_terms(i))
        for s in MultiIndex.up_to_degree(N, top):
            derived = Pi.partial(s)
            if derived.is_zero:
                continue
            image = action_operator(derived, source).apply(state)
            if image.is_zero:
                continue
            scale = Fraction(-1 if alternating and s.degree % 2 else 1, s.factorial)
            total = total + _gamma_power(s, image) * scale
    return total


def expand_L_via_Lplus(v: PolyVectorField, state: State) -> State:
    """Σ_i Σ_s (1/s!) γ_(-1)^s ℒ⁺(∂^s P_i ∂_i) applied to a FULL state"""
    return _taylor(v, state, Variant.LPLUS, alternating=False)


def expand_Lplus_via_L(v: PolyVectorField, state: State) -> State:
    """Σ_i Σ_s ((-1)^|s|/s!) γ_(-1)^s ℒ(∂^s P_i ∂_i) applied to a FULL state"""
    return _taylor(v, state, Variant.L, alternating=True)


# ---------------------------------------------------------------------------
# 𝔤₀[t] on SW states
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ArcActionElement:
    g: PolyVectorField
    t_power: int

    def __post_init__(self):
        if self.t_power < 0:
            raise GradeError(f"t power must be non-negative, got {self.t_power}")
        if not self.g.is_zero and self.g.degree != 0:
            raise VectorFieldError(f"The arc action needs a degree-0 field, got '{self.g.text}'")

    @cached_property
    def matrix(self) -> List[List[Fraction]]:
        return self.g.as_matrix()


def _arc_images(e: ArcActionElement, symbol: ModeSymbol) -> List[Tuple[Fraction, ModeSymbol]]:
    k = -symbol.mode
    n = e.t_power
    limit = k - 1 if symbol.species is Species.GAMMA else k
    if n >= limit:
        return []
    g = e.matrix
    d = symbol.direction - 1
    mode = symbol.mode + n
    if symbol.species in (Species.GAMMA, Species.C):
        targets = [(g[i][d], i + 1) for i in range(len(g))]
    else:
        targets = [(-g[d][j], j + 1) for j in range(len(g))]
    # γ_(-k) = α_(-k+1)/(k-1) and g t^n shifts α modes with coefficient 1
    scale = Fraction(k - 1 - n, k - 1) if symbol.species is Species.GAMMA else Fraction(1)
    return [(c * scale, ModeSymbol(symbol.species, target, mode)) for c, target in targets if c]


def arc_on_monomial(e: ArcActionElement, mono: Monomial) -> Terms:
    if not mono.is_plus:
        raise FlavorError("The arc action is defined on SW states without gamma_(-1)")
    out: Terms = {}
    for index, symbol in enumerate(mono.word):
        images = _arc_images(e, symbol)
        if not images:
            continue
        sign = -1 if symbol.species.is_odd and _odd_before(mono.word, index) % 2 else 1
        rest = Monomial(mono.word[:index] + mono.word[index + 1:], mono.gamma_poly)
        for coefficient, image in images:
            created = _create(image, rest)
            if created is not None:
                _accumulate(out, {created[1]: created[0]}, sign * coefficient)
    return out


def act_arc(e: ArcActionElement, state: State) -> State:
    """g t^n as an even derivation on SW monomials, shifting β, α, b and c modes by n"""
    if e.g.N != state.N:
        raise GradeError(f"Arc element on N={e.g.N} applied to a state on N={state.N}")
    out: Terms = {}
    for mono, coefficient in state.terms.items():
        _accumulate(out, arc_on_monomial(e, mono), coefficient)
    return State(out, state.N, state.flavor)


def arc_bracket(e: ArcActionElement, f: ArcActionElement) -> ArcActionElement:
    """[g t^i, h t^j] = [g, h] t^(i+j)"""
    return ArcActionElement(bracket(e.g, f.g), e.t_power + f.t_power)


def arc_bracket_check(e: ArcActionElement, f: ArcActionElement, state: State) -> bool:
    lhs = act_arc(e, act_arc(f, state)) - act_arc(f, act_arc(e, state))
    return lhs == act_arc(arc_bracket(e, f), state)


G0_FIELD = "1 x1 d1 - 1 x2 d2"
G1_FIELD = "1 x1 d2"


def _max_depth(state: State) -> int:
    return max((-symbol.mode for mono in state.terms for symbol in mono.word), default=0)


@dataclass(frozen=True)
class KOperator:
    """K_0, K_1 as sums of γ^1 multiplications after g t^l, and K_n = [K_0, K_{n-1}] (N = 2)"""

    order: int

    def __post_init__(self):
        if self.order < 0:
            raise FreeFieldError(f"K operators are indexed by n >= 0, got {self.order}")

    def apply(self, state: State) -> State:
        if state.N != 2:
            raise DimensionError(f"K operators live on N = 2 SW states (got N={state.N})")
        if self.order >= 2:
            previous = KOperator(self.order - 1)
            first = KOperator(0)
            return first.apply(previous.apply(state)) - previous.apply(first.apply(state))

        g0 = PolyVectorField.from_text(G0_FIELD, 2)
        g1 = PolyVectorField.from_text(G1_FIELD, 2)
        total = State.zero(2, state.flavor)
        for l in range(1, _max_depth(state) + 1):
            if self.order == 0:
                total = total + _gamma_times(1, l, act_arc(ArcActionElement(g0, l), state))
                total = total - _gamma_times(2, l, act_arc(ArcActionElement(g1, l), state))
            else:
                total = total + _gamma_times(1, l, act_arc(ArcActionElement(g1, l), state))
        return total


def _gamma_times(direction: int, l: int, state: State) -> State:
    return apply_mode(ModeSymbol(Species.GAMMA, direction, -l - 1), state)


def k_operator(n: int) -> KOperator:
    return KOperator(n)


def k0_gamma_commutator(l: int, state: State) -> State:
    """[K_0, γ^1_(-l)] = ½ Σ_{s=2}^{l-1} γ^1_(-s) γ^1_(-l-1+s), applied to state"""
    total = State.zero(state.N, state.flavor)
    for s in range(2, l):
        pair = apply_mode(ModeSymbol(Species.GAMMA, 1, -s), apply_mode(ModeSymbol(Species.GAMMA, 1, -l - 1 + s), state))
        total = total + pair * Fraction(1, 2)
    return total


def k0_arc_commutator(j: int, state: State) -> State:
    """[K_0, g_1 t^j] = Σ_{s≥1} (2 + s/(s+j)) γ^1_(-s-1) g_1 t^(j+s), applied to state"""
    g1 = PolyVectorField.from_text(G1_FIELD, 2)
    total = State.zero(2, state.flavor)
    for s in range(1, _max_depth(state) + 1):
        moved = _gamma_times(1, s, act_arc(ArcActionElement(g1, j + s), state))
        total = total + moved * (2 + Fraction(s, s + j))
    return total


def k2_closed_form(state: State) -> State:
    """K_2 = 3 Σ_{a,b≥1} γ^1_(-a-1) γ^1_(-b-1) g_1 t^(a+b) over ordered pairs"""
    g1 = PolyVectorField.from_text(G1_FIELD, 2)
    total = State.zero(2, state.flavor)
    depth = _max_depth(state)
    for a in range(1, depth + 1):
        for b in range(1, depth + 1):
            moved = act_arc(ArcActionElement(g1, a + b), state)
            total = total + _gamma_times(1, a, _gamma_times(1, b, moved)) * 3
    return total
