"""
Tests for polynomial vector fields, the graded bases and generation
"""
import random
from fractions import Fraction

import pytest

from app.algebra.vecfields import (
    AlgebraType,
    MultiIndex,
    PolyVectorField,
    basis_graded,
    bracket,
    default_g1,
    expected_dimension,
    generation_check,
    in_subalgebra,
    lie_derivative,
    random_element,
    span_rank,
    symplectic_form,
    volume_form,
)
from app.utils.utils import DimensionError, TextFormError, VectorFieldError


def field(text, N=2):
    return PolyVectorField.from_text(text, N)


def test_text_round_trip():
    v = field("2 x1^2 d2 - 1 x1 x2 d1")
    assert v.text == "2 x1^2 d2 - 1 x1 x2 d1"
    assert field("0").is_zero
    assert field("0").text == "0"
    assert field("x1 d2") == field("1 x1 d2")
    assert field("1/2 x2 d1").coeffs == {(MultiIndex((0, 1)), 1): Fraction(1, 2)}


def test_text_errors():
    with pytest.raises(TextFormError):
        field("x1 d3")
    with pytest.raises(TextFormError):
        field("x1 d1 x2 d2")
    with pytest.raises(TextFormError):
        field("")


def test_degree():
    assert field("1 x1 d2").degree == 0
    assert default_g1(2).degree == 1
    assert field("0").degree is None
    with pytest.raises(VectorFieldError):
        field("1 x1 d1 + 1 x1^2 d2").degree


def test_bracket_of_linear_fields():
    assert bracket(field("x1 d1"), field("x1 d2")) == field("x1 d2")
    assert bracket(field("x1 d2"), field("x2 d1")) == field("x1 d1 - 1 x2 d2")


def test_bracket_is_antisymmetric_and_graded():
    u, v = field("x1 x2 d1"), field("x2^2 d1 + 3 x1^2 d2")
    assert bracket(u, v) == -bracket(v, u)
    assert bracket(u, v).degree == 2


def test_jacobi_identity_on_random_elements():
    rng = random.Random(11)
    for _ in range(20):
        u, v, w = (random_element(AlgebraType.A, 3, rng.randint(0, 2), rng) for _ in range(3))
        total = bracket(u, bracket(v, w)) + bracket(v, bracket(w, u)) + bracket(w, bracket(u, v))
        assert total.is_zero


def test_divergence_and_subalgebra_membership():
    assert field("x1^2 d1").divergence() == 2 * field("x1^2 d1").ring.gens[0]
    assert not in_subalgebra(field("x1 d1"), AlgebraType.A)
    assert in_subalgebra(field("x1 d1 - 1 x2 d2"), AlgebraType.A)
    assert lie_derivative(field("x1 d2"), volume_form(2)).is_zero


def test_symplectic_constraint():
    with pytest.raises(DimensionError):
        symplectic_form(3)
    assert in_subalgebra(field("x1 d2", 4), AlgebraType.C)
    assert not in_subalgebra(field("x3 d1", 4), AlgebraType.C)


def test_dimension_formulas():
    for N in range(1, 4):
        for n in range(3):
            assert len(basis_graded(AlgebraType.A, N, n)) == expected_dimension(AlgebraType.A, N, n)
    for N in (2, 4):
        for n in range(3):
            assert len(basis_graded(AlgebraType.C, N, n)) == expected_dimension(AlgebraType.C, N, n)


def test_small_dimensions():
    assert len(basis_graded(AlgebraType.A, 2, 0)) == 3
    assert len(basis_graded(AlgebraType.A, 2, 1)) == 4
    assert len(basis_graded(AlgebraType.A, 1, 0)) == 0
    assert len(basis_graded(AlgebraType.C, 4, 0)) == 10


def test_basis_elements_live_in_the_algebra():
    for algebra, N in ((AlgebraType.A, 3), (AlgebraType.C, 4)):
        for n in range(3):
            for v in basis_graded(algebra, N, n):
                assert v.degree == n
                assert in_subalgebra(v, algebra)


def test_closure_under_bracket():
    g0 = basis_graded(AlgebraType.A, 2, 0)
    g1 = basis_graded(AlgebraType.A, 2, 1)
    produced = [bracket(u, v) for u in g0 for v in g1]
    assert span_rank(list(g1) + produced, 2, 1) == len(g1)


def test_generation_from_degree_zero_and_one_element():
    report = generation_check(AlgebraType.A, 2, 3)
    assert report.passed
    assert [row.expected_dim for row in report.rows] == [4, 5, 6]
    assert generation_check(AlgebraType.C, 2, 2).passed
    assert generation_check(AlgebraType.A, 3, 2).passed


def test_generation_rejects_bad_element():
    with pytest.raises(VectorFieldError):
        generation_check(AlgebraType.A, 2, 2, element=field("x1 d1 - 1 x2 d2"))


def test_matrix_of_linear_field():
    g = field("x1 d2 - 1 x2 d2")
    assert g.as_matrix() == [[0, 1], [0, -1]]
    assert PolyVectorField.from_matrix(g.as_matrix()) == g
    with pytest.raises(VectorFieldError):
        default_g1(2).as_matrix()


def test_random_element_is_seeded():
    a = random_element(AlgebraType.A, 2, 1, random.Random(5))
    b = random_element(AlgebraType.A, 2, 1, random.Random(5))
    assert a == b
    assert not a.is_zero
    assert in_subalgebra(a, AlgebraType.A)


def test_evaluate_components():
    v = field("x1^2 d2 - 1 x2 d1")
    assert v.evaluate_components([2, 3]) == (-3, 4)
    assert field("0").evaluate_components([1, 1]) == (0, 0)
