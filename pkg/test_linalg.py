"""
Tests for exact linear maps between weight spaces
"""
import pytest

from app.algebra.fock import Flavor, State, enumerate_basis
from app.algebra.linalg import SparseLinearMap
from app.algebra.vertex import composite_mode, generator_state
from app.utils.utils import GradeError


def identity_map(ws):
    return SparseLinearMap.from_operator(ws, ws, lambda mono: {mono: 1})


def test_maps_on_the_same_space_add():
    ws = enumerate_basis(Flavor.PLUS, 2, 0, 0)
    total = identity_map(ws) + identity_map(ws)
    assert total.entries() == {0: {0: 2}}
    assert (total - identity_map(ws)).entries() == {0: {0: 1}}
    assert (identity_map(ws) - identity_map(ws)).is_zero


def test_maps_with_different_n_do_not_add():
    one = identity_map(enumerate_basis(Flavor.PLUS, 1, 0, 0))
    two = identity_map(enumerate_basis(Flavor.PLUS, 2, 0, 0))
    assert one.source.grade == two.source.grade
    with pytest.raises(GradeError):
        one + two


def test_maps_with_different_flavor_do_not_add():
    plus = identity_map(enumerate_basis(Flavor.PLUS, 1, 0, 0))
    full = identity_map(enumerate_basis(Flavor.FULL, 1, 0, 0, 0))
    assert plus.shape == full.shape
    with pytest.raises(GradeError):
        plus - full


def test_composition_through_a_common_space():
    ws = enumerate_basis(Flavor.PLUS, 1, 0, 0)
    J = generator_state("J", 1)
    up = composite_mode(State.from_text("beta{1,-1}", 1), -1, ws)
    down = composite_mode(J, 0, up.target)
    composed = down.after(up)
    assert composed.source is ws
    assert composed.target.grade == up.target.grade
    assert composed.apply(State.vacuum(1)) == down.apply(up.apply(State.vacuum(1)))
    with pytest.raises(GradeError):
        up.after(up)
