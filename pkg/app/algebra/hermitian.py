"""
Positive definite Hermitian form on W₊(V) and the adjoint relations of the
generating fields. Squared norms stay rational: β_(n) contributes (-n) per
factor, word γ_(n) contributes 1/(-n-1), fermions contribute 1, and repeated
bosons pick up the factorial of their multiplicity.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

from sympy.polys.matrices import DomainMatrix

from app.algebra.fock import (
    Flavor,
    Grade,
    ModeSymbol,
    Monomial,
    Species,
    State,
    WeightSpace,
    enumerate_basis,
    grade_range,
    mode_on_monomial,
    weight_space_or_empty,
)
from app.algebra.linalg import SparseLinearMap, sparse_matrix
from app.algebra.vertex import GeneratorName, composite_mode, generator_state
from app.utils.utils import DimensionError, FlavorError, GradeError

logger = logging.getLogger(__name__)


def norm_squared(mono: Monomial) -> Fraction:
    if not mono.is_plus:
        raise FlavorError("The Hermitian form is only defined on PLUS states")
    value = Fraction(1)
    for symbol, multiplicity in Counter(mono.word).items():
        if symbol.species is Species.BETA:
            value *= Fraction(-symbol.mode) ** multiplicity
        elif symbol.species is Species.GAMMA:
            value *= Fraction(1, -symbol.mode - 1) ** multiplicity
        else:
            continue
        value *= math.factorial(multiplicity)
    return value


def inner(a: State, b: State) -> Fraction:
    """(a, b); monomials are orthogonal, so only shared terms contribute"""
    if Flavor.FULL in (a.flavor, b.flavor):
        raise FlavorError("The Hermitian form is only defined on PLUS states")
    if a.N != b.N:
        raise GradeError(f"States of dimension {a.N} and {b.N} cannot be paired")
    return sum(
        (coefficient * b.terms[mono] * norm_squared(mono) for mono, coefficient in a.terms.items() if mono in b.terms),
        Fraction(0),
    )


@dataclass(frozen=True, eq=False)
class GramMatrix:
    grade: Grade
    space: WeightSpace
    diagonal: Tuple[Fraction, ...]

    @property
    def matrix(self) -> DomainMatrix:
        return sparse_matrix({i: {i: d} for i, d in enumerate(self.diagonal)}, (len(self.diagonal),) * 2)

    @property
    def is_positive_definite(self) -> bool:
        return all(d > 0 for d in self.diagonal)


def gram_matrix(ws: WeightSpace) -> GramMatrix:
    if ws.flavor is not Flavor.PLUS:
        raise FlavorError("Gram matrices exist only for PLUS weight spaces")
    return GramMatrix(ws.grade, ws, tuple(norm_squared(mono) for mono in ws.basis))


class AdjointFamily(str, Enum):
    Q = "Q"
    J = "J"
    L = "L"
    D = "D"
    DP = "Dp"


# Adjoint of X_(n) as a combination of (coefficient, generator, mode)
AdjointRule = Callable[[int, int], List[Tuple[Fraction, GeneratorName, int]]]

_RULES: dict = {
    AdjointFamily.Q: (GeneratorName.Q, lambda n, N: [(Fraction(1), GeneratorName.G, -n + 1)]),
    AdjointFamily.J: (GeneratorName.J, lambda n, N: [(Fraction(1), GeneratorName.J, -n)]),
    AdjointFamily.L: (
        GeneratorName.L,
        lambda n, N: [(Fraction(1), GeneratorName.L, -n + 2), (Fraction(-(n - 1)), GeneratorName.J, -n + 1)],
    ),
    AdjointFamily.D: (
        GeneratorName.D,
        lambda n, N: [(Fraction((-1) ** (N * (N - 1) // 2)), GeneratorName.E, N - 2 - n)],
    ),
    AdjointFamily.DP: (GeneratorName.Dp, lambda n, N: [(Fraction(-1), GeneratorName.Ep, -n)]),
}


@dataclass(frozen=True)
class AdjointFailure:
    family: str
    grade: Grade
    mode: int
    witness: str


@dataclass(frozen=True)
class AdjointReport:
    family: str
    N: int
    k_max: int
    checked: int
    failure: Optional[AdjointFailure] = None

    @property
    def passed(self) -> bool:
        return self.failure is None


def _transpose_check(
    forward: SparseLinearMap, backward: SparseLinearMap
) -> Optional[Tuple[Monomial, Monomial]]:
    """Check forward^T · Gram(target) == Gram(source) · backward; returns a witness pair on failure"""
    source, target = forward.source, forward.target
    if source.dim == 0 or target.dim == 0:
        return None
    lhs = forward.matrix.transpose().matmul(gram_matrix(target).matrix)
    rhs = gram_matrix(source).matrix.matmul(backward.matrix)
    difference = SparseLinearMap(target, source, lhs - rhs)
    entry = difference.first_nonzero()
    if entry is None:
        return None
    i, j, _ = entry
    return source.basis[i], target.basis[j]


def _combined_modes(terms, ws: WeightSpace, N: int) -> SparseLinearMap:
    total: Optional[SparseLinearMap] = None
    for coefficient, name, mode in terms:
        piece = composite_mode(generator_state(name, N), mode, ws).scaled(coefficient)
        total = piece if total is None else total + piece
    return total


def adjoint_check(family: AdjointFamily, N: int, k_max: int, flip_sign: bool = False) -> AdjointReport:
    """
    X_(n)^T · Gram = Gram · X*_(n) on every pair of PLUS weight spaces with weights <= k_max.
    flip_sign negates the adjoint (negative control).
    """
    family = AdjointFamily(family)
    if family is AdjointFamily.DP and N % 2:
        raise DimensionError(f"D' requires an even dimension N (got N={N})")
    name, rule = _RULES[family]
    state = generator_state(name, N)
    weight, charge = state.grade()

    checked = 0
    for k in range(k_max + 1):
        for l in grade_range(N, k):
            ws = enumerate_basis(Flavor.PLUS, N, k, l)
            for n in range(k + weight - 1 - k_max, k + weight):
                forward = composite_mode(state, n, ws)
                target = forward.target
                if target.k < 0 or (ws.dim == 0 and target.dim == 0):
                    continue
                terms = rule(n, N)
                if flip_sign:
                    terms = [(-c, g, m) for c, g, m in terms]
                backward = _combined_modes(terms, target, N)
                if backward.target.grade != ws.grade:
                    raise GradeError(f"Adjoint of {family.value}_({n}) does not return to grade {ws.grade}")
                checked += 1
                witness = _transpose_check(forward, backward)
                if witness is not None:
                    failure = AdjointFailure(
                        family.value, ws.grade, n, f"<{witness[1].text}| {family.value}_({n}) |{witness[0].text}>"
                    )
                    logger.warning("❌ adjoint relation for %s_(%d) fails at grade %s", family.value, n, ws.grade)
                    return AdjointReport(family.value, N, k_max, checked, failure)
    logger.info("✅ adjoint relations for %s hold on %d mode/grade pairs", family.value, checked)
    return AdjointReport(family.value, N, k_max, checked)


def _single_mode_map(symbol: ModeSymbol, ws: WeightSpace, coefficient: int = 1) -> SparseLinearMap:
    target = weight_space_or_empty(Flavor.PLUS, ws.N, ws.k + symbol.shift, ws.l + symbol.species.charge)

    def column(mono: Monomial):
        result = mode_on_monomial(symbol, mono)
        return {} if result is None else {result[1]: coefficient * result[0]}

    return SparseLinearMap.from_operator(ws, target, column)


def single_mode_adjoint_check(N: int, k_max: int) -> AdjointReport:
    """(β_(n)A, B) = (A, α_(-n)B) and (b_(n)A, B) = (A, c_(-n-1)B) as matrix identities"""
    checked = 0
    for k in range(k_max + 1):
        for l in grade_range(N, k):
            ws = enumerate_basis(Flavor.PLUS, N, k, l)
            for n in range(k - k_max, k + 1):
                for i in range(1, N + 1):
                    pairs = [(ModeSymbol(Species.B, i, n), ModeSymbol(Species.C, i, -n - 1), 1)]
                    if n != 0:
                        # α_(-n) = n γ_(-n-1)
                        pairs.append((ModeSymbol(Species.BETA, i, n), ModeSymbol(Species.GAMMA, i, -n - 1), n))
                    for forward_symbol, backward_symbol, scale in pairs:
                        forward = _single_mode_map(forward_symbol, ws)
                        if forward.target.dim == 0 or ws.dim == 0:
                            continue
                        backward = _single_mode_map(backward_symbol, forward.target, scale)
                        checked += 1
                        witness = _transpose_check(forward, backward)
                        if witness is not None:
                            failure = AdjointFailure(
                                forward_symbol.species.label, ws.grade, n, f"{witness[0].text} / {witness[1].text}"
                            )
                            return AdjointReport("single-mode", N, k_max, checked, failure)
    return AdjointReport("single-mode", N, k_max, checked)
