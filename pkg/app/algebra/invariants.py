"""
Invariant subspaces of W₊(V) under the vector-field algebras, the span of the
vertex algebra generated by the free-field generators, and graded characters.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from app.algebra.action import (
    ArcActionElement,
    Variant,
    act_arc,
    act_Lplus,
    action_operator,
)
from app.algebra.fock import (
    Flavor,
    Grade,
    State,
    WeightSpace,
    enumerate_basis,
    grade_range,
    top_component,
)
from app.algebra.linalg import (
    echelon_rows,
    from_rows,
    kernel_rows,
    pivots,
    rank,
    row_vectors,
    vstack,
    zeros,
)
from app.algebra.vecfields import (
    AlgebraType,
    PolyVectorField,
    basis_graded,
    default_g1,
    in_subalgebra,
)
from app.algebra.vertex import field_of, generator_names, generator_state
from app.config import settings
from app.utils.utils import DimensionError, FreeFieldError, VectorFieldError

logger = logging.getLogger(__name__)


def _check_algebra(algebra: AlgebraType, N: int) -> AlgebraType:
    algebra = AlgebraType(algebra)
    if algebra is AlgebraType.C and N % 2:
        raise DimensionError(f"type C requires an even dimension N (got N={N})")
    return algebra


def check_g1_choice(algebra: AlgebraType, v: PolyVectorField) -> PolyVectorField:
    if v.is_zero:
        raise VectorFieldError("The degree-1 element must be nonzero")
    if v.degree != 1:
        raise VectorFieldError(f"'{v.text}' has degree {v.degree}, expected degree 1")
    if not in_subalgebra(v, algebra):
        raise VectorFieldError(f"'{v.text}' does not preserve the type {AlgebraType(algebra).value} form")
    return v


def _lplus_matrix(v: PolyVectorField, ws: WeightSpace) -> DomainMatrix:
    return action_operator(v, Variant.LPLUS).matrix(ws).matrix


def _joint_kernel(fields: Sequence[PolyVectorField], ws: WeightSpace) -> DomainMatrix:
    return kernel_rows(vstack([_lplus_matrix(v, ws) for v in fields], ws.dim))


def _restricted_kernel(v: PolyVectorField, ws: WeightSpace, subspace: DomainMatrix) -> DomainMatrix:
    """Rows of subspace (a basis) combined into a basis of its intersection with ker ℒ⁺(v)"""
    if subspace.shape[0] == 0:
        return subspace
    image = _lplus_matrix(v, ws).matmul(subspace.transpose())
    combos = kernel_rows(image)
    if combos.shape[0] == 0:
        return zeros(0, ws.dim)
    return echelon_rows(combos.matmul(subspace))


def _states(rows: DomainMatrix, ws: WeightSpace) -> Tuple[State, ...]:
    return tuple(ws.state_of(row) for row in row_vectors(rows))


@dataclass(frozen=True, eq=False)
class OracleSpan:
    """Graded span of the vertex algebra generated by the generators of one type"""

    algebra: AlgebraType
    N: int
    k_max: int
    bases: Mapping[Grade, Tuple[State, ...]]

    def dim(self, k: int, l: int) -> int:
        return len(self.bases.get(Grade(k, l), ()))

    def rows(self, k: int, l: int) -> DomainMatrix:
        ws = enumerate_basis(Flavor.PLUS, self.N, k, l)
        return from_rows([ws.coordinates(s.terms) for s in self.bases.get(Grade(k, l), ())], ws.dim)


@dataclass(frozen=True, eq=False)
class InvariantReport:
    N: int
    algebra: AlgebraType
    grade: Grade
    dim_basis: int
    dim_g0_invariants: int
    dim_full_invariants: int
    basis: Tuple[State, ...]
    g1_choice: str
    dim_oracle_span: Optional[int] = None
    oracle_contained: Optional[bool] = None
    dim_all_degrees: Optional[int] = None

    @property
    def matches_oracle(self) -> Optional[bool]:
        if self.dim_oracle_span is None:
            return None
        return self.dim_oracle_span == self.dim_full_invariants


def invariant_space(
    algebra: AlgebraType,
    N: int,
    k: int,
    l: int,
    g1_choice: Optional[PolyVectorField] = None,
    cross_check: bool = False,
    oracle: Optional[OracleSpan] = None,
) -> InvariantReport:
    """
    Kernel of ℒ⁺ over the degree-0 basis, then of ℒ⁺(g1_choice) on that subspace.
    cross_check also intersects over full bases of degrees 0, 1 and 2.
    """
    algebra = _check_algebra(algebra, N)
    g1 = None
    if g1_choice is not None:
        g1 = check_g1_choice(algebra, g1_choice)
    elif basis_graded(algebra, N, 1):
        g1 = check_g1_choice(algebra, default_g1(N))
    ws = enumerate_basis(Flavor.PLUS, N, k, l)

    g0_kernel = _joint_kernel(basis_graded(algebra, N, 0), ws)
    # the degree-1 piece vanishes when N = 1
    full = _restricted_kernel(g1, ws, g0_kernel) if g1 is not None else g0_kernel

    dim_all = None
    if cross_check:
        everything = [v for n in range(3) for v in basis_graded(algebra, N, n)]
        dim_all = _joint_kernel(everything, ws).shape[0]

    dim_oracle = contained = None
    if oracle is not None:
        dim_oracle = oracle.dim(k, l)
        spanned = oracle.rows(k, l)
        contained = rank(vstack([full, spanned], ws.dim)) == full.shape[0]

    report = InvariantReport(
        N=N,
        algebra=algebra,
        grade=Grade(k, l),
        dim_basis=ws.dim,
        dim_g0_invariants=g0_kernel.shape[0],
        dim_full_invariants=full.shape[0],
        basis=_states(full, ws),
        g1_choice=g1.text if g1 is not None else "0",
        dim_oracle_span=dim_oracle,
        oracle_contained=contained,
        dim_all_degrees=dim_all,
    )
    logger.debug(
        "invariants %s N=%d grade (%d,%d): basis %d, g0 %d, full %d",
        algebra.value, N, k, l, ws.dim, report.dim_g0_invariants, report.dim_full_invariants,
    )
    return report


def _close_grade(existing: List[State], candidates: List[State], ws: WeightSpace) -> List[State]:
    """Candidates independent of existing (and of each other), chosen by pivot columns"""
    vectors = [ws.coordinates(s.terms) for s in existing + candidates]
    columns = from_rows(vectors, ws.dim).transpose()
    chosen = [p for p in pivots(columns) if p >= len(existing)]
    return [candidates[p - len(existing)] for p in chosen]


@lru_cache(maxsize=settings.cache_size)
def oracle_span(algebra: AlgebraType, N: int, k_max: int) -> OracleSpan:
    """
    Close the vacuum under every mode g_(n) of the generators that lands at
    weight <= k_max, until nothing new appears.
    """
    algebra = _check_algebra(algebra, N)
    generators = [generator_state(name, N) for name in generator_names(algebra)]
    fields = [(field_of(g), g.grade()) for g in generators]

    vacuum = State.vacuum(N)
    found: Dict[Grade, List[State]] = {Grade(0, 0): [vacuum]}
    frontier = [vacuum]
    rounds = 0
    while frontier:
        rounds += 1
        candidates: Dict[Grade, List[State]] = {}
        for x in frontier:
            kx, lx = x.grade()
            for f, (weight, charge) in fields:
                for n in range(kx + weight - 1 - k_max, kx + weight):
                    terms = f.on_terms(n, x.terms)
                    if terms:
                        target = Grade(kx + weight - n - 1, lx + charge)
                        candidates.setdefault(target, []).append(State(terms, N))

        frontier = []
        for target in sorted(candidates):
            ws = enumerate_basis(Flavor.PLUS, N, target.k, target.l)
            existing = found.setdefault(target, [])
            new = _close_grade(existing, candidates[target], ws)
            existing.extend(new)
            frontier.extend(new)
        logger.debug("oracle closure round %d added %d states", rounds, len(frontier))

    bases = {}
    for target, states in sorted(found.items()):
        ws = enumerate_basis(Flavor.PLUS, N, target.k, target.l)
        reduced = echelon_rows(from_rows([ws.coordinates(s.terms) for s in states], ws.dim))
        bases[target] = _states(reduced, ws)
    logger.info("✅ generated span of type %s at N=%d closed after %d rounds", algebra.value, N, rounds)
    return OracleSpan(algebra, N, k_max, bases)


class CharacterSource(str, Enum):
    WEIGHT_SPACES = "weight-spaces"
    INVARIANTS = "invariants"
    ORACLE = "oracle"


def character(source: CharacterSource, N: int, k_max: int, algebra: AlgebraType = AlgebraType.A) -> Counter:
    """Double-graded dimension table; missing grades read as 0"""
    try:
        source = CharacterSource(source)
    except ValueError:
        expected = ", ".join(s.value for s in CharacterSource)
        raise FreeFieldError(f"Unknown character source '{source}'; expected one of {expected}")
    table: Counter = Counter()
    span = oracle_span(algebra, N, k_max) if source is CharacterSource.ORACLE else None
    for k in range(k_max + 1):
        for l in grade_range(N, k):
            if source is CharacterSource.WEIGHT_SPACES:
                dim = enumerate_basis(Flavor.PLUS, N, k, l).dim
            elif source is CharacterSource.ORACLE:
                dim = span.dim(k, l)
            else:
                dim = invariant_space(algebra, N, k, l).dim_full_invariants
            if dim:
                table[Grade(k, l)] = dim
    return table


@dataclass(frozen=True)
class EvidenceRow:
    algebra: AlgebraType
    grade: Grade
    dim_basis: int
    dim_g0_invariants: int
    dim_oracle_span: int
    dim_full_invariants: int
    contained: bool
    witnesses: Tuple[str, ...] = ()

    @property
    def status(self) -> str:
        return "MATCH" if self.dim_oracle_span == self.dim_full_invariants else "GAP"


@dataclass(frozen=True)
class EvidenceReport:
    N: int
    k_max: int
    rows: Tuple[EvidenceRow, ...]
    label: str = "evidence"
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def containment_holds(self) -> bool:
        return all(row.contained for row in self.rows)


def _gap_witnesses(report: InvariantReport, span: OracleSpan, limit: int = 3) -> Tuple[str, ...]:
    """Invariant basis vectors outside the generated span"""
    ws = enumerate_basis(Flavor.PLUS, report.N, *report.grade)
    spanned = span.rows(*report.grade)
    witnesses = []
    for state in report.basis:
        row = from_rows([ws.coordinates(state.terms)], ws.dim)
        if rank(vstack([spanned, row], ws.dim)) > spanned.shape[0]:
            witnesses.append(state.text)
            if len(witnesses) == limit:
                break
    return tuple(witnesses)


def evidence_row(
    algebra: AlgebraType,
    N: int,
    k: int,
    l: int,
    span: OracleSpan,
    g1_choice: Optional[PolyVectorField] = None,
) -> EvidenceRow:
    """Invariants against the generated span at one grade"""
    report = invariant_space(algebra, N, k, l, g1_choice=g1_choice, oracle=span)
    witnesses = _gap_witnesses(report, span) if not report.matches_oracle else ()
    return EvidenceRow(
        report.algebra,
        report.grade,
        report.dim_basis,
        report.dim_g0_invariants,
        report.dim_oracle_span,
        report.dim_full_invariants,
        bool(report.oracle_contained),
        witnesses,
    )


def conjecture_evidence(N: int = 3, k_max: int = 2) -> EvidenceReport:
    """
    Generated span against invariants, grade by grade. Type C is added when N
    is even. Rows are evidence only; equality is not asserted.
    """
    algebras = [AlgebraType.A] + ([AlgebraType.C] if N % 2 == 0 else [])
    rows = []
    for algebra in algebras:
        span = oracle_span(algebra, N, k_max)
        for k in range(k_max + 1):
            for l in grade_range(N, k):
                row = evidence_row(algebra, N, k, l, span)
                if row.dim_basis:
                    rows.append(row)
    notes = (
        f"weights capped at k_max={k_max}",
        "the second clause of the conjectured equality is read as type C",
    ) if N % 2 == 0 else (f"weights capped at k_max={k_max}",)
    logger.info("conjecture evidence at N=%d: %d rows", N, len(rows))
    return EvidenceReport(N, k_max, tuple(rows), notes=notes)


def generator_annihilation(algebra: AlgebraType, N: int) -> List[str]:
    """Pairs (v, generator) where ℒ⁺(v) does not kill the generator state"""
    algebra = _check_algebra(algebra, N)
    fields = list(basis_graded(algebra, N, 0)) + list(basis_graded(algebra, N, 1))
    failures = []
    for name in generator_names(algebra):
        state = generator_state(name, N)
        for v in fields:
            if not act_Lplus(v, state).is_zero:
                failures.append(f"L+({v.text}) {name.value} != 0")
    return failures


def top_degree_check(report: InvariantReport) -> List[str]:
    """Invariant basis vectors whose top SW-degree part is moved by some g t"""
    failures = []
    g0 = basis_graded(report.algebra, report.N, 0)
    for state in report.basis:
        top = top_component(state)
        for g in g0:
            if not act_arc(ArcActionElement(g, 1), top).is_zero:
                failures.append(f"({g.text}) t on top of {state.text}")
    return failures
