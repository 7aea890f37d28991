"""
Polynomial vector fields on V = C^N with coefficients in QQ[x1..xN], their Lie
brackets, Lie derivatives of constant forms, and graded bases of the
divergence-free (type A) and symplectic (type C) subalgebras.
"""
from __future__ import annotations

import itertools
import logging
import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.rings import PolyElement, PolyRing, ring

from app.algebra.linalg import (
    echelon_rows,
    from_qq,
    from_rows,
    kernel_rows,
    rank,
    row_vectors,
    sparse_matrix,
    to_qq,
)
from app.config import settings
from app.utils.utils import DimensionError, GradeError, TextFormError, VectorFieldError, text_forms

logger = logging.getLogger(__name__)


class AlgebraType(str, Enum):
    A = "A"
    C = "C"


@lru_cache(maxsize=settings.cache_size)
def poly_ring(N: int) -> PolyRing:
    return ring(",".join(f"x{i}" for i in range(1, N + 1)), QQ)[0]


@dataclass(frozen=True, order=True)
class MultiIndex:
    exponents: Tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def factorial(self) -> int:
        return math.prod(math.factorial(e) for e in self.exponents)

    @classmethod
    def zero(cls, N: int) -> "MultiIndex":
        return cls((0,) * N)

    @classmethod
    def unit(cls, i: int, N: int) -> "MultiIndex":
        return cls(tuple(1 if j == i else 0 for j in range(1, N + 1)))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        return MultiIndex(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    @classmethod
    def all_of_degree(cls, N: int, degree: int) -> Tuple["MultiIndex", ...]:
        """Multi-indices with |s| = degree, lexicographically descending (x1^d first)"""
        found = [
            cls(exps) for exps in itertools.product(range(degree + 1), repeat=N) if sum(exps) == degree
        ]
        return tuple(sorted(found, reverse=True))

    @classmethod
    def up_to_degree(cls, N: int, degree: int) -> Tuple["MultiIndex", ...]:
        return tuple(s for d in range(degree + 1) for s in cls.all_of_degree(N, d))

    @property
    def text(self) -> str:
        factors = []
        for i, e in enumerate(self.exponents, start=1):
            if e == 1:
                factors.append(f"x{i}")
            elif e > 1:
                factors.append(f"x{i}^{e}")
        return " ".join(factors)


@dataclass(frozen=True, eq=False)
class PolyVectorField:
    """Σ_i P_i ∂/∂x_i with P_i in QQ[x1..xN]"""

    components: Tuple[PolyElement, ...]

    @property
    def N(self) -> int:
        return len(self.components)

    @property
    def ring(self) -> PolyRing:
        return poly_ring(self.N)

    @classmethod
    def zero(cls, N: int) -> "PolyVectorField":
        R = poly_ring(N)
        return cls(tuple(R.zero for _ in range(N)))

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[Tuple[MultiIndex, int], Fraction], N: int) -> "PolyVectorField":
        R = poly_ring(N)
        per_direction: List[Dict[Tuple[int, ...], object]] = [{} for _ in range(N)]
        for (s, i), value in coeffs.items():
            if s.N != N or not 1 <= i <= N:
                raise VectorFieldError(f"Term ({s.exponents}, {i}) does not fit dimension N={N}")
            if value:
                bucket = per_direction[i - 1]
                bucket[s.exponents] = bucket.get(s.exponents, QQ(0)) + to_qq(value)
        return cls(tuple(R.from_dict(bucket) if bucket else R.zero for bucket in per_direction))

    @classmethod
    def monomial(cls, s: MultiIndex, direction: int, coefficient: Fraction = Fraction(1)) -> "PolyVectorField":
        return cls.from_coeffs({(s, direction): coefficient}, s.N)

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[Fraction]]) -> "PolyVectorField":
        """Degree-0 field Σ g_ij x_i ∂_j"""
        N = len(matrix)
        coeffs = {}
        for i in range(1, N + 1):
            for j in range(1, N + 1):
                coeffs[(MultiIndex.unit(i, N), j)] = matrix[i - 1][j - 1]
        return cls.from_coeffs(coeffs, N)

    @classmethod
    def from_text(cls, text: str, N: int) -> "PolyVectorField":
        coeffs: Dict[Tuple[MultiIndex, int], Fraction] = {}
        for coefficient, exponents, direction in text_forms.parse_vector_field(text):
            if not 1 <= direction <= N or any(not 1 <= var <= N for var in exponents):
                raise TextFormError(f"Vector field '{text}' uses a coordinate outside 1..{N}")
            s = MultiIndex(tuple(exponents.get(i, 0) for i in range(1, N + 1)))
            coeffs[(s, direction)] = coeffs.get((s, direction), Fraction(0)) + coefficient
        return cls.from_coeffs(coeffs, N)

    @property
    def coeffs(self) -> Dict[Tuple[MultiIndex, int], Fraction]:
        out = {}
        for i, poly in enumerate(self.components, start=1):
            for monom, value in poly.items():
                out[(MultiIndex(tuple(monom)), i)] = from_qq(value)
        return out

    def component_terms(self, direction: int) -> List[Tuple[MultiIndex, Fraction]]:
        poly = self.components[direction - 1]
        return [(MultiIndex(tuple(m)), from_qq(c)) for m, c in sorted(poly.items(), reverse=True)]

    @property
    def is_zero(self) -> bool:
        return not any(self.components)

    @property
    def degree(self) -> Optional[int]:
        """Homogeneous degree n (coefficients of polynomial degree n + 1); None for the zero field"""
        degrees = {sum(m) for poly in self.components for m in poly.itermonoms()}
        if not degrees:
            return None
        if len(degrees) > 1:
            raise VectorFieldError(f"Vector field '{self.text}' is not homogeneous")
        return degrees.pop() - 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.N == other.N and all(p == q for p, q in zip(self.components, other.components))

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(tuple(p + q for p, q in zip(self.components, other.components)))

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        return PolyVectorField(tuple(p - q for p, q in zip(self.components, other.components)))

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField(tuple(-p for p in self.components))

    def scaled(self, scalar: Fraction) -> "PolyVectorField":
        factor = to_qq(scalar)
        return PolyVectorField(tuple(p * factor for p in self.components))

    def partial(self, s: MultiIndex) -> "PolyVectorField":
        """∂^s applied to every coefficient"""
        gens = self.ring.gens
        parts = []
        for poly in self.components:
            for variable, times in zip(gens, s.exponents):
                for _ in range(times):
                    poly = poly.diff(variable)
            parts.append(poly)
        return PolyVectorField(tuple(parts))

    def only_direction(self, direction: int) -> "PolyVectorField":
        R = self.ring
        return PolyVectorField(tuple(p if i == direction else R.zero for i, p in enumerate(self.components, start=1)))

    def divergence(self) -> PolyElement:
        return sum((p.diff(x) for p, x in zip(self.components, self.ring.gens)), self.ring.zero)

    def evaluate_components(self, point: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        values = [to_qq(v) for v in point]
        return tuple(from_qq(p(*values)) if p else Fraction(0) for p in self.components)

    def as_matrix(self) -> List[List[Fraction]]:
        """g with g[i][j] the coefficient of x_(i+1) ∂_(j+1); degree-0 fields only"""
        if not self.is_zero and self.degree != 0:
            raise VectorFieldError(f"Only degree-0 fields have a matrix, got '{self.text}'")
        N = self.N
        matrix = [[Fraction(0)] * N for _ in range(N)]
        for (s, j), value in self.coeffs.items():
            i = s.exponents.index(1)
            matrix[i][j - 1] = value
        return matrix

    @property
    def text(self) -> str:
        terms = sorted(self.coeffs.items(), key=lambda item: (tuple(-e for e in item[0][0].exponents), item[0][1]))
        if not terms:
            return "0"
        parts = []
        for (s, direction), value in terms:
            body = " ".join(
                piece for piece in (text_forms.format_fraction(abs(value)), s.text, f"d{direction}") if piece
            )
            if not parts:
                parts.append(body if value > 0 else f"-{body}")
            else:
                parts.append(("+ " if value > 0 else "- ") + body)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"PolyVectorField({self.text!r})"


def bracket(u: PolyVectorField, v: PolyVectorField) -> PolyVectorField:
    """[Σ P_i ∂_i, Σ Q_j ∂_j] = Σ_j Σ_i (P_i ∂_i Q_j - Q_i ∂_i P_j) ∂_j"""
    if u.N != v.N:
        raise VectorFieldError(f"Fields on dimensions {u.N} and {v.N} cannot be bracketed")
    gens = u.ring.gens
    parts = []
    for Pj, Qj in zip(u.components, v.components):
        total = u.ring.zero
        for Pi, Qi, x in zip(u.components, v.components, gens):
            total += Pi * Qj.diff(x) - Qi * Pj.diff(x)
        parts.append(total)
    return PolyVectorField(tuple(parts))


def _sorted_with_sign(indices: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    if len(set(indices)) < len(indices):
        return 0, ()
    inversions = sum(1 for a, b in itertools.combinations(indices, 2) if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(indices))


@dataclass(frozen=True, eq=False)
class ConstantForm:
    arity: int
    N: int
    components: Mapping[Tuple[int, ...], Fraction]

    def __post_init__(self):
        normalized: Dict[Tuple[int, ...], Fraction] = {}
        for indices, value in self.components.items():
            if len(indices) != self.arity or any(not 1 <= i <= self.N for i in indices):
                raise VectorFieldError(f"Form component {indices} does not fit arity {self.arity}, N={self.N}")
            sign, key = _sorted_with_sign(indices)
            if sign:
                normalized[key] = normalized.get(key, Fraction(0)) + sign * Fraction(value)
        object.__setattr__(self, "components", {k: v for k, v in sorted(normalized.items()) if v})

    def component(self, indices: Sequence[int]) -> Fraction:
        sign, key = _sorted_with_sign(indices)
        return sign * self.components.get(key, Fraction(0)) if sign else Fraction(0)


def volume_form(N: int) -> ConstantForm:
    return ConstantForm(N, N, {tuple(range(1, N + 1)): Fraction(1)})


def symplectic_form(N: int) -> ConstantForm:
    if N % 2:
        raise DimensionError(f"type C requires an even dimension N (got N={N})")
    return ConstantForm(2, N, {(2 * i - 1, 2 * i): Fraction(1) for i in range(1, N // 2 + 1)})


def constraint_form(algebra: AlgebraType, N: int) -> ConstantForm:
    if AlgebraType(algebra) is AlgebraType.C:
        return symplectic_form(N)
    return volume_form(N)


@dataclass(frozen=True, eq=False)
class PolyForm:
    """Form with polynomial coefficients, components keyed by increasing index tuples"""

    arity: int
    N: int
    components: Mapping[Tuple[int, ...], PolyElement]

    @property
    def is_zero(self) -> bool:
        return not any(self.components.values())


def lie_derivative(v: PolyVectorField, omega: ConstantForm) -> PolyForm:
    """
    L_v ω for constant ω:
    (L_v ω)_I = Σ_m Σ_j (∂v_j / ∂x_{I_m}) ω_{I with I_m replaced by j}
    """
    N = v.N
    if omega.N != N:
        raise VectorFieldError(f"Form on N={omega.N} cannot be paired with a field on N={N}")
    R = v.ring
    gens = R.gens
    result: Dict[Tuple[int, ...], PolyElement] = {}
    for I in itertools.combinations(range(1, N + 1), omega.arity):
        total = R.zero
        for m, position in enumerate(I):
            for j in range(1, N + 1):
                value = omega.component(I[:m] + (j,) + I[m + 1:])
                if value:
                    total += v.components[j - 1].diff(gens[position - 1]) * to_qq(value)
        if total:
            result[I] = total
    return PolyForm(omega.arity, N, result)


def divergence(v: PolyVectorField) -> PolyElement:
    return v.divergence()


# ---------------------------------------------------------------------------
# Graded bases
# ---------------------------------------------------------------------------

@lru_cache(maxsize=settings.cache_size)
def field_basis(N: int, n: int) -> Tuple[Tuple[MultiIndex, int], ...]:
    """Monomial x direction basis of Sym^{n+1}(V*) ⊗ V"""
    return tuple((s, i) for s in MultiIndex.all_of_degree(N, n + 1) for i in range(1, N + 1))


def coordinates(v: PolyVectorField, n: int) -> Dict[int, Fraction]:
    position = {key: index for index, key in enumerate(field_basis(v.N, n))}
    vector = {}
    for key, value in v.coeffs.items():
        if key not in position:
            raise GradeError(f"'{v.text}' has terms outside degree {n}")
        vector[position[key]] = value
    return vector


def from_coordinates(vector: Mapping[int, Fraction], N: int, n: int) -> PolyVectorField:
    keys = field_basis(N, n)
    return PolyVectorField.from_coeffs({keys[i]: value for i, value in vector.items()}, N)


def span_rank(fields: Iterable[PolyVectorField], N: int, n: int) -> int:
    rows = [coordinates(v, n) for v in fields]
    return rank(from_rows(rows, len(field_basis(N, n))))


def _echelon_fields(fields: Iterable[PolyVectorField], N: int, n: int) -> List[PolyVectorField]:
    rows = [coordinates(v, n) for v in fields]
    reduced = echelon_rows(from_rows(rows, len(field_basis(N, n))))
    return [from_coordinates(row, N, n) for row in row_vectors(reduced)]


@lru_cache(maxsize=settings.cache_size)
def basis_graded(algebra: AlgebraType, N: int, n: int) -> Tuple[PolyVectorField, ...]:
    """Echelonized basis of {v of degree n : L_v ω = 0}"""
    algebra = AlgebraType(algebra)
    if n < 0:
        raise GradeError(f"Graded pieces start at degree 0, got n={n}")
    omega = constraint_form(algebra, N)
    unknowns = field_basis(N, n)

    row_of: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], int] = {}
    table: Dict[int, Dict[int, Fraction]] = {}
    for column, (s, i) in enumerate(unknowns):
        derived = lie_derivative(PolyVectorField.monomial(s, i), omega)
        for I, poly in derived.components.items():
            for monom, value in poly.items():
                row = row_of.setdefault((I, tuple(monom)), len(row_of))
                table.setdefault(row, {})[column] = from_qq(value)

    kernel = kernel_rows(sparse_matrix(table, (len(row_of), len(unknowns))))
    basis = tuple(from_coordinates(row, N, n) for row in row_vectors(kernel))
    logger.debug("basis of type %s, N=%d, degree %d has %d elements", algebra.value, N, n, len(basis))
    return basis


def expected_dimension(algebra: AlgebraType, N: int, n: int) -> int:
    if AlgebraType(algebra) is AlgebraType.C:
        return math.comb(N + n + 1, n + 2)
    return N * math.comb(N + n, n + 1) - math.comb(N + n - 1, n)


def in_subalgebra(v: PolyVectorField, algebra: AlgebraType) -> bool:
    return lie_derivative(v, constraint_form(algebra, v.N)).is_zero


def default_g1(N: int) -> PolyVectorField:
    """x1^2 ∂/∂x2, a nonzero element of degree 1 for both types"""
    if N < 2:
        raise DimensionError("The degree-1 witness x1^2 d2 needs N >= 2")
    return PolyVectorField.monomial(MultiIndex((2,) + (0,) * (N - 1)), 2)


def random_element(algebra: AlgebraType, N: int, n: int, rng: random.Random) -> PolyVectorField:
    """Nonzero integer combination of the degree-n basis"""
    basis = basis_graded(algebra, N, n)
    if not basis:
        raise VectorFieldError(f"Degree {n} piece of type {AlgebraType(algebra).value} at N={N} is zero")
    while True:
        v = PolyVectorField.zero(N)
        for element in basis:
            v = v + element.scaled(Fraction(rng.randint(-3, 3)))
        if not v.is_zero:
            return v


@dataclass(frozen=True)
class GenerationRow:
    n: int
    achieved_rank: int
    expected_dim: int

    @property
    def full(self) -> bool:
        return self.achieved_rank == self.expected_dim


@dataclass(frozen=True)
class GenerationReport:
    algebra: AlgebraType
    N: int
    element: str
    rows: Tuple[GenerationRow, ...]

    @property
    def passed(self) -> bool:
        return all(row.full for row in self.rows)


def _ad_closure(seeds: List[PolyVectorField], g0: Sequence[PolyVectorField], N: int, n: int) -> List[PolyVectorField]:
    current = _echelon_fields([v for v in seeds if not v.is_zero], N, n)
    frontier = current
    while frontier:
        produced = [bracket(x, v) for x in g0 for v in frontier]
        grown = _echelon_fields(current + produced, N, n)
        if len(grown) == len(current):
            break
        current = frontier = grown
    return current


def generation_check(
    algebra: AlgebraType, N: int, n_max: int, element: Optional[PolyVectorField] = None
) -> GenerationReport:
    """Rank of the degree-n part of the algebra generated by the degree-0 piece and one degree-1 element"""
    algebra = AlgebraType(algebra)
    if n_max < 1:
        raise GradeError(f"generation_check needs n_max >= 1, got {n_max}")
    x = element if element is not None else default_g1(N)
    if x.is_zero or x.degree != 1 or not in_subalgebra(x, algebra):
        raise VectorFieldError(f"'{x.text}' is not a nonzero degree-1 element of type {algebra.value}")

    g0 = basis_graded(algebra, N, 0)
    layers = {1: _ad_closure([x], g0, N, 1)}
    for n in range(2, n_max + 1):
        layers[n] = _echelon_fields([bracket(y, z) for y in layers[1] for z in layers[n - 1]], N, n)

    rows = tuple(
        GenerationRow(n, len(layers[n]), len(basis_graded(algebra, N, n))) for n in range(1, n_max + 1)
    )
    return GenerationReport(algebra, N, x.text, rows)
