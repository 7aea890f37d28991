"""
Tests for the property suite run by verify
"""
import pytest

from app.algebra.properties import (
    PASS,
    SKIP,
    PropertyContext,
    _generator_set,
    commutator_formula,
    k_operator_identities,
    lie_homomorphism,
    run_properties,
    top_degree_arc_invariance,
)
from app.algebra.vertex import GeneratorName
from app.utils.utils import FreeFieldError


def test_commutator_formula_uses_every_generator():
    assert len(_generator_set(2)) == 10
    assert GeneratorName.Dp in _generator_set(2)
    assert len(_generator_set(3)) == 8
    assert GeneratorName.Dp not in _generator_set(3)


def test_commutator_formula():
    assert commutator_formula(PropertyContext(N=2, k_max=1)).status == PASS


def test_lie_homomorphism_property():
    assert lie_homomorphism(PropertyContext(N=2, k_max=1)).status == PASS


def test_k_operator_identities():
    assert k_operator_identities(PropertyContext(N=2, k_max=2)).status == PASS
    assert k_operator_identities(PropertyContext(N=3, k_max=1)).status == SKIP


def test_top_degree_arc_invariance():
    assert top_degree_arc_invariance(PropertyContext(N=2, k_max=2)).status == PASS


def test_unknown_property():
    with pytest.raises(FreeFieldError):
        run_properties(PropertyContext(), ["nope"])


@pytest.mark.slow
def test_full_suite_at_weight_three():
    outcomes = run_properties(PropertyContext(N=2, k_max=3))
    failed = [(o.name, o.witness) for o in outcomes if not o.passed]
    assert failed == []
    assert len(outcomes) == 24
