"""
Tests for n-th products, composite modes and the generating fields
"""
from fractions import Fraction

import pytest

from app.config import settings
from app.algebra.fock import Flavor, Grade, State, enumerate_basis, grade_range, translate
from app.algebra.vecfields import AlgebraType
from app.algebra.vertex import (
    GeneratorName,
    LinearField,
    central_charge_experiment,
    composite_mode,
    composite_zero_mode,
    field_of,
    generator_grades,
    generator_names,
    generator_state,
    normal_order,
    nth_product,
    state_field,
    translation_matches_virasoro,
)
from app.utils.utils import DimensionError, GradeError


def state(text, N=1):
    return State.from_text(text, N)


def basis_states(N, k_max):
    for k in range(k_max + 1):
        for l in grade_range(N, k):
            yield from enumerate_basis(Flavor.PLUS, N, k, l).basis_states()


def test_creation_identity():
    vacuum = State.vacuum(2)
    for s in basis_states(2, 2):
        assert nth_product(s, -1, vacuum) == s


def test_vacuum_acts_as_identity():
    vacuum = State.vacuum(1)
    for s in basis_states(1, 2):
        assert nth_product(vacuum, -1, s) == s
        assert nth_product(vacuum, 0, s).is_zero


def test_generator_products():
    beta = state("beta{1,-1}")
    gamma = state("gamma{1,-2}")
    vacuum = State.vacuum(1)
    # β_(1) ∂γ = 1
    assert nth_product(beta, 1, gamma) == vacuum
    assert nth_product(beta, 0, gamma).is_zero
    assert normal_order(beta, state("c{1,-1}")) == state("beta{1,-1} c{1,-1}")


def test_fermion_products():
    b, c = state("b{1,-1}"), state("c{1,-1}")
    assert nth_product(b, 0, c) == State.vacuum(1)
    assert normal_order(b, c) == state("b{1,-1} c{1,-1}")
    assert normal_order(c, b) == -state("b{1,-1} c{1,-1}")


def test_conformal_vector():
    expected = state("beta{1,-1} gamma{1,-2}") - state("b{1,-1} c{1,-2}")
    assert generator_state(GeneratorName.L, 1) == expected


def test_supercurrent():
    expected = state("beta{1,-1} c{1,-1}", 2) + state("beta{2,-1} c{2,-1}", 2)
    assert generator_state("Q", 2) == expected


def test_generator_grades_type_a():
    assert generator_grades(AlgebraType.A, 2) == {
        GeneratorName.Q: Grade(1, 1),
        GeneratorName.L: Grade(2, 0),
        GeneratorName.J: Grade(1, 0),
        GeneratorName.G: Grade(2, -1),
        GeneratorName.D: Grade(2, -2),
        GeneratorName.E: Grade(0, 2),
        GeneratorName.B: Grade(2, -1),
        GeneratorName.C: Grade(1, 1),
    }


def test_type_c_generators_need_even_n():
    assert GeneratorName.Dp in generator_names(AlgebraType.C)
    assert generator_state("Dp", 2).grade() == Grade(2, -2)
    with pytest.raises(DimensionError):
        generator_state("Ep", 3)


def test_virasoro_zero_mode_is_weight_one_mode_is_translation():
    L = generator_state("L", 2)
    for k in range(3):
        for l in grade_range(2, k):
            ws = enumerate_basis(Flavor.PLUS, 2, k, l)
            table = composite_mode(L, 1, ws).entries()
            assert table == ({i: {i: Fraction(k)} for i in range(ws.dim)} if k else {})
    for s in basis_states(2, 2):
        assert translation_matches_virasoro(s)


def test_current_zero_mode_measures_charge():
    J = generator_state("J", 2)
    for k in range(3):
        for l in grade_range(2, k):
            ws = enumerate_basis(Flavor.PLUS, 2, k, l)
            table = composite_zero_mode(J, ws).entries()
            assert table == ({i: {i: Fraction(l)} for i in range(ws.dim)} if l else {})


def test_derivative_compatibility():
    a = generator_state("Q", 1)
    for b in basis_states(1, 2):
        for n in range(3):
            assert nth_product(translate(a), n, b) == nth_product(a, n - 1, b) * -n


def test_commutator_formula_for_current_and_supercurrent():
    # [J_(m), Q_(n)] = (J_(0)Q)_(m+n) since J_(j)Q = 0 for j >= 1
    J, Q = generator_state("J", 1), generator_state("Q", 1)
    assert nth_product(J, 0, Q) == Q
    assert nth_product(J, 1, Q).is_zero
    for c in basis_states(1, 2):
        for m in range(-1, 2):
            for n in range(-1, 2):
                lhs = nth_product(J, m, nth_product(Q, n, c)) - nth_product(Q, n, nth_product(J, m, c))
                assert lhs == nth_product(Q, m + n, c)


def test_central_charge_experiment():
    assert central_charge_experiment(1) == {
        "twisted_c": Fraction(0),
        "j_anomaly": Fraction(1),
        "untwisted_c": Fraction(3),
    }
    assert central_charge_experiment(2)["untwisted_c"] == 6


def test_non_homogeneous_left_argument_rejected():
    mixed = state("beta{1,-1}") + state("c{1,-1}")
    with pytest.raises(GradeError):
        nth_product(mixed, 0, State.vacuum(1))


def test_full_states_allowed():
    g = State.from_text("g[1]", 1, Flavor.FULL)
    product = normal_order(g, state("b{1,-1}"))
    assert product.flavor is Flavor.FULL
    assert product == State.from_text("b{1,-1} g[1]", 1, Flavor.FULL)


def test_field_memo_is_bounded(monkeypatch):
    monkeypatch.setattr(settings, "field_memo_limit", 3)
    L = field_of(generator_state(GeneratorName.L, 2))
    assert isinstance(L, LinearField)
    calls = 0
    for k in range(2):
        for l in grade_range(2, k):
            for mono in enumerate_basis(Flavor.PLUS, 2, k, l).basis:
                for n in range(-1, 3):
                    L.on_monomial(n, mono)
                    calls += 1
    assert calls > 3
    assert 0 < len(L._memo) <= 3


def test_caches_are_bounded():
    assert state_field.cache_info().maxsize == settings.cache_size
    assert enumerate_basis.cache_info().maxsize == settings.cache_size
