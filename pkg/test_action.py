"""
Tests for the ℒ and ℒ⁺ actions, the arc action and the K operators
"""
import itertools
from fractions import Fraction

import pytest

from app.algebra.action import (
    G1_FIELD,
    ArcActionElement,
    Variant,
    act_arc,
    act_L,
    act_Lplus,
    action_operator,
    arc_bracket,
    arc_bracket_check,
    expand_L_via_Lplus,
    expand_Lplus_via_L,
    k0_arc_commutator,
    k0_gamma_commutator,
    k2_closed_form,
    k_operator,
    lie_state,
)
from app.algebra.fock import Flavor, Grade, ModeSymbol, Species, State, apply_mode, enumerate_basis, grade_range
from app.algebra.vecfields import AlgebraType, PolyVectorField, basis_graded, bracket, default_g1
from app.utils.utils import DimensionError, FlavorError, FreeFieldError, GradeError, VectorFieldError


def field(text, N=2):
    return PolyVectorField.from_text(text, N)


def state(text, N=2, flavor=None):
    return State.from_text(text, N, flavor)


def plus_states(N, k_max):
    for k in range(k_max + 1):
        for l in grade_range(N, k):
            yield from enumerate_basis(Flavor.PLUS, N, k, l).basis_states()


def full_states(N, k_max, bound):
    for k in range(k_max + 1):
        for l in grade_range(N, k):
            yield from enumerate_basis(Flavor.FULL, N, k, l, bound).basis_states()


def test_linear_field_moves_gamma_direction():
    assert act_Lplus(field("x1 d2"), state("gamma{2,-2}")) == state("gamma{1,-2}")
    assert act_Lplus(field("x1 d2"), state("gamma{1,-2}")).is_zero


def test_euler_field_on_ghost():
    assert act_Lplus(field("x1 d1"), state("c{1,-1}")) == state("c{1,-1}")


def test_lie_state_grade():
    X = lie_state(field("x1 d2"))
    assert X.flavor is Flavor.FULL
    assert X.grade() == Grade(1, 0)
    assert lie_state(field("0")).is_zero


def test_degree_zero_actions_agree_on_plus_states():
    g0 = basis_graded(AlgebraType.A, 2, 0)
    for s in plus_states(2, 2):
        for v in g0:
            assert act_Lplus(v, s) == act_L(v, s)


def test_lplus_preserves_grade():
    for n in range(3):
        for v in basis_graded(AlgebraType.A, 2, n):
            for k in range(3):
                for l in grade_range(2, k):
                    ws = enumerate_basis(Flavor.PLUS, 2, k, l)
                    assert action_operator(v, Variant.LPLUS).matrix(ws).shape == (ws.dim, ws.dim)


def test_action_operator_is_shared():
    v = default_g1(2)
    assert action_operator(v, Variant.LPLUS) is action_operator(field(v.text), "L+")


def low_degree_fields():
    return list(basis_graded(AlgebraType.A, 2, 0)) + list(basis_graded(AlgebraType.A, 2, 1))


def check_lie_homomorphism(k_max, bound):
    fields = low_degree_fields()
    assert len(list(itertools.combinations(fields, 2))) == 21
    for s in full_states(2, k_max, bound):
        for u, v in itertools.combinations(fields, 2):
            lhs = act_L(u, act_L(v, s)) - act_L(v, act_L(u, s))
            assert lhs == act_L(bracket(u, v), s), f"[{u.text}, {v.text}] on {s.text}"


def test_lie_homomorphism_on_full_states():
    check_lie_homomorphism(1, 1)


@pytest.mark.slow
def test_lie_homomorphism_at_full_scale():
    check_lie_homomorphism(2, 2)


def test_taylor_expansions():
    v = default_g1(2)
    lplus = action_operator(v, Variant.LPLUS)
    for s in full_states(2, 1, 2):
        assert act_L(v, s) == expand_L_via_Lplus(v, s)
        assert lplus.apply(s) == expand_Lplus_via_L(v, s)


def test_flavor_errors():
    with pytest.raises(FlavorError):
        act_Lplus(field("x1 d1"), State.vacuum(2, Flavor.FULL))
    with pytest.raises(FlavorError):
        action_operator(field("x1 d1"), Variant.L).matrix(enumerate_basis(Flavor.PLUS, 2, 0, 0))


def test_operator_rejects_other_n():
    with pytest.raises(GradeError):
        act_Lplus(field("x1 d1"), State.vacuum(3))


def test_arc_element_validation():
    with pytest.raises(GradeError):
        ArcActionElement(field("x1 d1"), -1)
    with pytest.raises(VectorFieldError):
        ArcActionElement(default_g1(2), 0)


def test_arc_action_on_generators():
    euler = field("x1 d1")
    assert act_arc(ArcActionElement(euler, 0), state("c{1,-1}")) == state("c{1,-1}")
    assert act_arc(ArcActionElement(euler, 1), state("c{1,-1}")).is_zero
    assert act_arc(ArcActionElement(euler, 0), state("gamma{1,-2}")) == state("gamma{1,-2}")
    assert act_arc(ArcActionElement(euler, 1), state("gamma{1,-2}")).is_zero
    assert act_arc(ArcActionElement(euler, 1), state("beta{1,-3}")) == state("beta{1,-2}") * -1


def test_arc_action_scales_gamma_like_alpha():
    g1 = field("x1 d2")
    assert act_arc(ArcActionElement(g1, 1), state("gamma{2,-3}")) == state("gamma{1,-2}") * Fraction(1, 2)
    assert act_arc(ArcActionElement(g1, 1), state("gamma{2,-4}")) == state("gamma{1,-3}") * Fraction(2, 3)
    assert act_arc(ArcActionElement(g1, 2), state("gamma{2,-4}")) == state("gamma{1,-2}") * Fraction(1, 3)
    assert act_arc(ArcActionElement(g1, 3), state("gamma{2,-4}")).is_zero


def test_arc_action_matches_lplus_at_t_zero():
    for v in basis_graded(AlgebraType.A, 2, 0):
        for s in plus_states(2, 2):
            assert act_arc(ArcActionElement(v, 0), s) == act_Lplus(v, s)


def test_arc_brackets():
    g0 = basis_graded(AlgebraType.A, 2, 0)
    assert arc_bracket(ArcActionElement(g0[0], 1), ArcActionElement(g0[1], 2)).t_power == 3
    for s in plus_states(2, 2):
        for g, h in itertools.combinations(g0, 2):
            for i, j in ((0, 1), (1, 1), (1, 2)):
                assert arc_bracket_check(ArcActionElement(g, i), ArcActionElement(h, j), s)


def gamma1(mode, s):
    return apply_mode(ModeSymbol(Species.GAMMA, 1, mode), s)


def test_k0_on_single_gamma():
    expected = gamma1(-2, state("gamma{1,-2}")) * Fraction(1, 2)
    assert k_operator(0).apply(state("gamma{1,-3}")) == expected
    assert k_operator(0).apply(State.vacuum(2)).is_zero


def test_k1_expands_its_defining_sum():
    K1 = k_operator(1)
    # Σ_l γ^1_(-l-1) g1 t^l with g1 t γ^2_(-4) = 2/3 γ^1_(-3) and g1 t^2 γ^2_(-4) = 1/3 γ^1_(-2)
    assert K1.apply(state("gamma{2,-4}")) == gamma1(-2, state("gamma{1,-3}"))
    expected = -(gamma1(-2, state("beta{2,-2}")) + gamma1(-3, state("beta{2,-1}")))
    assert K1.apply(state("beta{1,-3}")) == expected
    assert K1.apply(state("gamma{1,-4}")).is_zero
    g1 = field(G1_FIELD)
    for s in plus_states(2, 2):
        total = State.zero(2)
        for l in range(1, 7):
            total = total + gamma1(-l - 1, act_arc(ArcActionElement(g1, l), s))
        assert K1.apply(s) == total


def test_k0_commutator_with_gamma_modes():
    K0 = k_operator(0)
    for l in range(2, 6):
        gamma = ModeSymbol(Species.GAMMA, 1, -l)
        for s in plus_states(2, 1):
            lhs = K0.apply(apply_mode(gamma, s)) - apply_mode(gamma, K0.apply(s))
            rhs = State.zero(2)
            for r in range(2, l):
                rhs = rhs + gamma1(-r, gamma1(-l - 1 + r, s)) * Fraction(1, 2)
            assert lhs == rhs
            assert lhs == k0_gamma_commutator(l, s)


def test_k0_commutator_with_arc_action():
    K0 = k_operator(0)
    arc = ArcActionElement(field(G1_FIELD), 1)
    s = state("gamma{2,-4}")
    lhs = K0.apply(act_arc(arc, s)) - act_arc(arc, K0.apply(s))
    assert lhs == gamma1(-2, state("gamma{1,-2}")) * Fraction(5, 6)
    assert lhs == k0_arc_commutator(1, s)
    for j in (1, 2):
        arc = ArcActionElement(field(G1_FIELD), j)
        for s in plus_states(2, 2):
            assert K0.apply(act_arc(arc, s)) - act_arc(arc, K0.apply(s)) == k0_arc_commutator(j, s)


def test_k2_closed_form():
    cube = gamma1(-2, gamma1(-2, state("gamma{1,-2}")))
    assert k_operator(2).apply(state("gamma{2,-4}")) == cube
    for s in plus_states(2, 3):
        assert k_operator(2).apply(s) == k2_closed_form(s)


def test_k_operator_errors():
    with pytest.raises(FreeFieldError):
        k_operator(-1)
    with pytest.raises(DimensionError):
        k_operator(0).apply(State.vacuum(1))
