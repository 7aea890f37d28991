"""Exact sparse linear algebra over QQ on top of sympy's DomainMatrix."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from app.algebra.fock import Monomial, Scalar, State, WeightSpace
from app.utils.utils import GradeError


def to_qq(value: Scalar):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def sparse_matrix(entries: Mapping[int, Mapping[int, Scalar]], shape: Tuple[int, int]) -> DomainMatrix:
    """Build a sparse QQ matrix from {row: {column: value}}"""
    rows = {}
    for i, row in entries.items():
        cleaned = {j: to_qq(v) for j, v in row.items() if v}
        if cleaned:
            rows[i] = cleaned
    return DomainMatrix(rows, shape, QQ)


def zeros(rows: int, cols: int) -> DomainMatrix:
    return DomainMatrix({}, (rows, cols), QQ)


def identity(n: int) -> DomainMatrix:
    return DomainMatrix({i: {i: QQ(1)} for i in range(n)}, (n, n), QQ)


def entries(matrix: DomainMatrix) -> Dict[int, Dict[int, Fraction]]:
    sdm = matrix.to_sparse().rep
    table = {i: {j: from_qq(v) for j, v in row.items() if v} for i, row in sdm.items()}
    return {i: row for i, row in table.items() if row}


def row_vectors(matrix: DomainMatrix) -> List[Dict[int, Fraction]]:
    table = entries(matrix)
    return [table.get(i, {}) for i in range(matrix.shape[0])]


def from_rows(rows: Sequence[Mapping[int, Scalar]], ncols: int) -> DomainMatrix:
    return sparse_matrix(dict(enumerate(rows)), (len(rows), ncols))


def vstack(matrices: Sequence[DomainMatrix], ncols: int) -> DomainMatrix:
    """Stack matrices with ncols columns; an empty sequence gives 0 rows"""
    parts = [m.to_sparse() for m in matrices if m.shape[0]]
    if not parts:
        return zeros(0, ncols)
    if len(parts) == 1:
        return parts[0]
    return parts[0].vstack(*parts[1:])


def echelon_rows(matrix: DomainMatrix) -> DomainMatrix:
    """Reduced row echelon form with zero rows dropped"""
    rows, cols = matrix.shape
    if rows == 0 or cols == 0:
        return zeros(0, cols)
    reduced, pivots = matrix.to_sparse().rref()
    kept = entries(reduced)
    return from_rows([kept.get(i, {}) for i in range(len(pivots))], cols)


def pivots(matrix: DomainMatrix) -> Tuple[int, ...]:
    rows, cols = matrix.shape
    if rows == 0 or cols == 0:
        return ()
    return tuple(matrix.to_sparse().rref()[1])


def rank(matrix: DomainMatrix) -> int:
    return len(pivots(matrix))


def kernel_rows(matrix: DomainMatrix) -> DomainMatrix:
    """
    Basis of the right kernel as the rows of a matrix in reduced echelon form
    (first nonzero column pivots, smallest row first).
    """
    rows, cols = matrix.shape
    if cols == 0:
        return zeros(0, 0)
    if rows == 0 or matrix.to_sparse().is_zero_matrix:
        return identity(cols)
    null = matrix.to_sparse().nullspace()
    if null.shape[0] == 0:
        return zeros(0, cols)
    return echelon_rows(null)


def _space_key(ws: WeightSpace) -> Tuple:
    return ws.N, ws.flavor, ws.grade, ws.gamma_degree_bound


@dataclass(frozen=True, eq=False)
class SparseLinearMap:
    """Exact matrix of an operator from one weight space to another (target.dim x source.dim)"""

    source: WeightSpace
    target: WeightSpace
    matrix: DomainMatrix

    @classmethod
    def from_columns(
        cls, source: WeightSpace, target: WeightSpace, columns: Iterable[Mapping[Monomial, Scalar]]
    ) -> "SparseLinearMap":
        table: Dict[int, Dict[int, Scalar]] = {}
        for j, column in enumerate(columns):
            for i, value in target.coordinates(column).items():
                table.setdefault(i, {})[j] = value
        return cls(source, target, sparse_matrix(table, (target.dim, source.dim)))

    @classmethod
    def from_operator(
        cls,
        source: WeightSpace,
        target: WeightSpace,
        operator: Callable[[Monomial], Mapping[Monomial, Scalar]],
    ) -> "SparseLinearMap":
        return cls.from_columns(source, target, (operator(mono) for mono in source.basis))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    @property
    def is_zero(self) -> bool:
        return self.matrix.to_sparse().is_zero_matrix

    def entries(self) -> Dict[int, Dict[int, Fraction]]:
        return entries(self.matrix)

    def apply(self, state: State) -> State:
        vector = self.source.coordinates(state.terms)
        out: Dict[Monomial, Scalar] = {}
        for i, row in self.entries().items():
            value = sum((c * vector.get(j, 0) for j, c in row.items()), Fraction(0))
            if value:
                out[self.target.basis[i]] = value
        return State(out, self.target.N, self.target.flavor)

    def _check_same_spaces(self, other: "SparseLinearMap") -> None:
        if _space_key(self.source) != _space_key(other.source) or _space_key(self.target) != _space_key(other.target):
            raise GradeError("Linear maps between different weight spaces cannot be combined")

    def __add__(self, other: "SparseLinearMap") -> "SparseLinearMap":
        self._check_same_spaces(other)
        return SparseLinearMap(self.source, self.target, self.matrix.to_sparse() + other.matrix.to_sparse())

    def __sub__(self, other: "SparseLinearMap") -> "SparseLinearMap":
        self._check_same_spaces(other)
        return SparseLinearMap(self.source, self.target, self.matrix.to_sparse() - other.matrix.to_sparse())

    def after(self, first: "SparseLinearMap") -> "SparseLinearMap":
        """self ∘ first; first must land in the source of self"""
        if _space_key(first.target) != _space_key(self.source):
            raise GradeError("Linear maps compose only through a common weight space")
        return SparseLinearMap(first.source, self.target, self.matrix.to_sparse().matmul(first.matrix.to_sparse()))

    def scaled(self, scalar: Scalar) -> "SparseLinearMap":
        return SparseLinearMap(self.source, self.target, self.matrix.to_sparse() * to_qq(scalar))

    def first_nonzero(self) -> Optional[Tuple[int, int, Fraction]]:
        for i, row in sorted(self.entries().items()):
            for j, value in sorted(row.items()):
                return i, j, value
        return None
