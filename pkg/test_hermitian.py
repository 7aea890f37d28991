"""
Tests for the Hermitian form and the adjoint relations
"""
from fractions import Fraction

import pytest

from app.algebra.fock import Flavor, Monomial, State, enumerate_basis, grade_range
from app.algebra.hermitian import (
    AdjointFamily,
    adjoint_check,
    gram_matrix,
    inner,
    norm_squared,
    single_mode_adjoint_check,
)
from app.utils.utils import DimensionError, FlavorError


def mono(text, N=1):
    return Monomial.from_text(text, N)


def test_norms_of_single_modes():
    assert norm_squared(Monomial.vacuum(1)) == 1
    assert norm_squared(mono("beta{1,-2}")) == 2
    assert norm_squared(mono("gamma{1,-3}")) == Fraction(1, 2)
    assert norm_squared(mono("b{1,-1} c{1,-2}")) == 1


def test_repeated_boson_norm():
    assert norm_squared(mono("beta{1,-1} beta{1,-1}")) == 2
    assert norm_squared(mono("gamma{1,-2} gamma{1,-2}")) == 2


def test_inner_product_is_diagonal_on_monomials():
    a = State.from_text("beta{1,-1}", 1) * 3 + State.from_text("c{1,-1}", 1)
    b = State.from_text("beta{1,-1}", 1) + State.from_text("gamma{1,-2} b{1,-1}", 1)
    assert inner(a, b) == 3
    assert inner(a, a) == 10


def test_full_states_have_no_norm():
    with pytest.raises(FlavorError):
        norm_squared(Monomial.from_text("g[1]", 1))
    with pytest.raises(FlavorError):
        inner(State.vacuum(1, Flavor.FULL), State.vacuum(1))
    with pytest.raises(FlavorError):
        gram_matrix(enumerate_basis(Flavor.FULL, 1, 0, 0, 1))


def test_gram_matrices_are_positive_definite():
    for k in range(4):
        for l in grade_range(2, k):
            assert gram_matrix(enumerate_basis(Flavor.PLUS, 2, k, l)).is_positive_definite


@pytest.mark.parametrize("family", list(AdjointFamily))
def test_adjoint_relations_hold(family):
    report = adjoint_check(family, 2, 2)
    assert report.passed
    assert report.checked > 0


def test_adjoint_relations_odd_n():
    for family in (AdjointFamily.Q, AdjointFamily.J, AdjointFamily.L):
        assert adjoint_check(family, 1, 2).passed
    with pytest.raises(DimensionError):
        adjoint_check(AdjointFamily.DP, 3, 1)


def test_flipped_adjoint_is_caught():
    report = adjoint_check(AdjointFamily.J, 2, 2, flip_sign=True)
    assert not report.passed
    assert report.failure.family == "J"
    assert "J_(" in report.failure.witness


def test_single_mode_adjoints():
    assert single_mode_adjoint_check(2, 2).passed


@pytest.mark.slow
@pytest.mark.parametrize("family", list(AdjointFamily))
def test_adjoint_relations_up_to_weight_three(family):
    assert adjoint_check(family, 2, 3).passed


@pytest.mark.slow
def test_single_mode_adjoints_up_to_weight_three():
    assert single_mode_adjoint_check(2, 3).passed
