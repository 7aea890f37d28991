"""
Tests for the Fock space: monomials, mode action, grading and weight spaces
"""
from fractions import Fraction

import pytest

from app.algebra.fock import (
    NON_HOMOGENEOUS,
    Flavor,
    Grade,
    ModeSymbol,
    Monomial,
    Species,
    State,
    apply_alpha,
    apply_mode,
    enumerate_basis,
    grade_range,
    product_character,
    sw_degree,
    top_component,
    translate,
)
from app.utils.utils import FlavorError, GradeError, TextFormError


def state(text, N=1, flavor=None):
    return State.from_text(text, N, flavor)


def mode(species, direction, n):
    return ModeSymbol(species, direction, n)


def test_vacuum_grade():
    assert State.vacuum(3).grade() == Grade(0, 0)
    assert Monomial.vacuum(2).text == "1"


def test_grade_of_mixed_word():
    assert state("beta{1,-1} c{1,-1}").grade() == Grade(1, 1)
    assert state("gamma{1,-3} b{1,-2}").grade() == Grade(4, -1)


def test_zero_and_mixed_states_have_no_grade():
    assert State.zero(2).grade() is NON_HOMOGENEOUS
    mixed = state("beta{1,-1}") + state("c{1,-1}")
    assert mixed.grade() is NON_HOMOGENEOUS
    assert not mixed.is_homogeneous
    assert set(mixed.components()) == {Grade(1, 0), Grade(0, 1)}


def test_boson_bracket_signs():
    vacuum = State.vacuum(1)
    assert apply_mode(mode(Species.BETA, 1, 1), state("gamma{1,-2}")) == vacuum
    assert apply_mode(mode(Species.GAMMA, 1, 1), state("beta{1,-2}")) == -vacuum


def test_fermion_bracket():
    vacuum = State.vacuum(1)
    assert apply_mode(mode(Species.B, 1, 0), state("c{1,-1}")) == vacuum
    assert apply_mode(mode(Species.C, 1, 0), state("b{1,-1}")) == vacuum


def test_fermions_anticommute():
    vacuum = State.vacuum(2)
    c1, c2 = mode(Species.C, 1, -1), mode(Species.C, 2, -1)
    one_two = apply_mode(c1, apply_mode(c2, vacuum))
    two_one = apply_mode(c2, apply_mode(c1, vacuum))
    assert one_two == -two_one
    assert apply_mode(c1, apply_mode(c1, vacuum)).is_zero


def test_repeated_boson_counts_multiplicity():
    squared = apply_mode(mode(Species.BETA, 1, -1), state("beta{1,-1}"))
    lowered = apply_mode(mode(Species.GAMMA, 1, 0), squared)
    assert lowered == state("beta{1,-1}") * -2


def test_annihilators_kill_vacuum():
    vacuum = State.vacuum(2)
    for species in Species:
        assert apply_mode(mode(species, 1, 0), vacuum).is_zero
        assert apply_mode(mode(species, 2, 3), vacuum).is_zero


def test_gamma_minus_one_needs_full_flavor():
    with pytest.raises(FlavorError):
        apply_mode(mode(Species.GAMMA, 1, -1), State.vacuum(1))
    full = apply_mode(mode(Species.GAMMA, 1, -1), State.vacuum(1, Flavor.FULL))
    assert full.flavor is Flavor.FULL
    assert full.gamma_degree == 1
    assert full.grade() == Grade(0, 0)


def test_beta_zero_mode_differentiates_gamma_polynomial():
    squared = state("g[2]", flavor=Flavor.FULL)
    assert apply_mode(mode(Species.BETA, 1, 0), squared) == state("g[1]", flavor=Flavor.FULL) * 2


def test_alpha_is_derivative_of_gamma():
    assert apply_alpha(1, 0, State.vacuum(1)).is_zero
    assert apply_alpha(1, -1, State.vacuum(1)) == state("gamma{1,-2}")


def test_translate_raises_weight_by_one():
    assert translate(state("beta{1,-2}")) == state("beta{1,-3}") * 2
    assert translate(state("c{1,-1}")) == state("c{1,-2}")
    assert translate(State.vacuum(2)).is_zero
    assert translate(state("g[1]", flavor=Flavor.FULL)) == state("gamma{1,-2}", flavor=Flavor.FULL)


def test_text_round_trip_and_format():
    s = state("beta{1,-1} c{1,-1}") * Fraction(3, 2) - state("b{1,-1} c{1,-2}")
    assert s.text == "3/2*beta{1,-1} c{1,-1} - 1*b{1,-1} c{1,-2}"


def test_text_rejects_bad_input():
    with pytest.raises(TextFormError):
        Monomial.from_text("c{2,-1} c{1,-1}", 2)
    with pytest.raises(TextFormError):
        Monomial.from_text("c{1,-1} c{1,-1}", 1)
    with pytest.raises(TextFormError):
        Monomial.from_text("gamma{1,-1}", 1)
    with pytest.raises(TextFormError):
        Monomial.from_text("delta{1,-1}", 1)


def test_weight_zero_spaces():
    dims = [enumerate_basis(Flavor.PLUS, 2, 0, l).dim for l in grade_range(2, 0)]
    assert dims == [1, 2, 1]


def test_weight_one_n_one():
    dims = {l: enumerate_basis(Flavor.PLUS, 1, 1, l).dim for l in grade_range(1, 1)}
    assert dims == {-1: 1, 0: 3, 1: 3, 2: 1}


def test_enumeration_matches_product_character():
    for N in (1, 2, 3):
        k_max = 3 if N < 3 else 2
        expected = product_character(N, k_max)
        for k in range(k_max + 1):
            for l in grade_range(N, k):
                assert enumerate_basis(Flavor.PLUS, N, k, l).dim == expected.get((k, l), 0)


def test_product_character_small_table():
    assert product_character(1, 1) == {
        Grade(0, 0): 1,
        Grade(0, 1): 1,
        Grade(1, -1): 1,
        Grade(1, 0): 3,
        Grade(1, 1): 3,
        Grade(1, 2): 1,
    }


def test_basis_is_deterministic_and_homogeneous():
    ws = enumerate_basis(Flavor.PLUS, 2, 2, 1)
    assert ws.basis == enumerate_basis(Flavor.PLUS, 2, 2, 1).basis
    assert all(mono.grade == (2, 1) for mono in ws.basis)
    assert len(set(ws.basis)) == ws.dim


def test_full_spaces_need_a_bound():
    with pytest.raises(GradeError):
        enumerate_basis(Flavor.FULL, 1, 0, 0)
    ws = enumerate_basis(Flavor.FULL, 2, 0, 0, 2)
    # 1, g1, g2, g1^2, g1 g2, g2^2
    assert ws.dim == 6


def test_negative_weight_rejected():
    with pytest.raises(GradeError):
        enumerate_basis(Flavor.PLUS, 1, -1, 0)


def test_coordinates_reject_foreign_monomials():
    ws = enumerate_basis(Flavor.PLUS, 1, 1, 0)
    with pytest.raises(GradeError):
        ws.coordinates({Monomial.from_text("c{1,-1}", 1): 1})
    assert ws.state_of(ws.coordinates(state("beta{1,-1}").terms)) == state("beta{1,-1}")


def test_sw_degree_and_top_component():
    assert sw_degree(Monomial.from_text("gamma{1,-2} c{1,-1}", 1)) == 3
    s = state("gamma{1,-2}") + state("beta{1,-1}")
    assert top_component(s) == state("gamma{1,-2}")
