"""
Named checks run by the verify command. Each check takes a PropertyContext
and returns a PropertyOutcome; a failing check names a witness.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from app.algebra.action import (
    ArcActionElement,
    Variant,
    act_arc,
    act_L,
    act_Lplus,
    action_operator,
    G1_FIELD,
    arc_bracket_check,
    expand_L_via_Lplus,
    expand_Lplus_via_L,
    k0_arc_commutator,
    k0_gamma_commutator,
    k2_closed_form,
    k_operator,
)
from app.algebra.fock import (
    Flavor,
    Grade,
    ModeSymbol,
    Species,
    State,
    WeightSpace,
    apply_mode,
    enumerate_basis,
    grade_range,
    product_character,
    translate,
)
from app.algebra.hermitian import AdjointFamily, adjoint_check, gram_matrix, single_mode_adjoint_check
from app.algebra.invariants import (
    generator_annihilation,
    invariant_space,
    oracle_span,
    top_degree_check,
)
from app.algebra.linalg import SparseLinearMap
from app.algebra.vecfields import (
    AlgebraType,
    PolyVectorField,
    basis_graded,
    bracket,
    default_g1,
    expected_dimension,
    generation_check,
    random_element,
    span_rank,
)
from app.algebra.vertex import (
    GeneratorName,
    composite_mode,
    generalized_binomial,
    generator_names,
    generator_state,
    nth_product,
)
from app.utils.utils import FreeFieldError

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
SKIP = "skip"


@dataclass(frozen=True)
class PropertyContext:
    N: int = 2
    algebra: AlgebraType = AlgebraType.A
    k_max: int = 2
    seed: int = 20240601
    inject_sign_flip: bool = False

    def rng(self, name: str) -> random.Random:
        """Per-check generator so results do not depend on which checks run"""
        return random.Random(f"{self.seed}:{name}")

    def weights(self, cap: int) -> range:
        return range(min(self.k_max, cap) + 1)


@dataclass(frozen=True)
class PropertyOutcome:
    name: str
    status: str
    witness: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.status != FAIL


def _passed(name: str) -> PropertyOutcome:
    return PropertyOutcome(name, PASS)


def _failed(name: str, witness: str) -> PropertyOutcome:
    return PropertyOutcome(name, FAIL, witness)


def _spaces(ctx: PropertyContext, cap: int, flavor: Flavor = Flavor.PLUS, bound: Optional[int] = None) -> Iterator[WeightSpace]:
    for k in ctx.weights(cap):
        for l in grade_range(ctx.N, k):
            ws = enumerate_basis(flavor, ctx.N, k, l, bound)
            if ws.dim:
                yield ws


def _basis_states(ctx: PropertyContext, cap: int) -> Iterator[State]:
    for ws in _spaces(ctx, cap):
        yield from ws.basis_states()


def _operator_symbols(N: int, modes: Iterable[int]) -> List[ModeSymbol]:
    return [
        ModeSymbol(species, i, n)
        for species in Species
        for i in range(1, N + 1)
        for n in modes
        if not (species is Species.GAMMA and n == -1)
    ]


def _bracket_scalar(x: ModeSymbol, y: ModeSymbol) -> int:
    if y.species is not x.species.partner or x.direction != y.direction or x.mode + y.mode + 1 != 0:
        return 0
    # [β_(m), γ_(n)] = 1 and {b, c} = 1; [γ, β] = -1
    return -1 if x.species is Species.GAMMA else 1


# ---------------------------------------------------------------------------
# fock
# ---------------------------------------------------------------------------

def character_identity(ctx: PropertyContext) -> PropertyOutcome:
    k_max = min(ctx.k_max, 5)
    expected = product_character(ctx.N, k_max)
    for k in range(k_max + 1):
        for l in grade_range(ctx.N, k):
            dim = enumerate_basis(Flavor.PLUS, ctx.N, k, l).dim
            if dim != expected.get((k, l), 0):
                return _failed("character_identity", f"grade ({k},{l}): enumerated {dim}, character {expected.get((k, l), 0)}")
    return _passed("character_identity")


def bracket_relations(ctx: PropertyContext) -> PropertyOutcome:
    rng = ctx.rng("bracket_relations")
    symbols = _operator_symbols(ctx.N, range(-2, 3))
    pairs = [(rng.choice(symbols), rng.choice(symbols)) for _ in range(120)]
    for s in _basis_states(ctx, 2):
        for x, y in pairs:
            sign = 1 if x.species.is_odd and y.species.is_odd else -1
            lhs = apply_mode(x, apply_mode(y, s)) + sign * apply_mode(y, apply_mode(x, s))
            if lhs != s * _bracket_scalar(x, y):
                return _failed("bracket_relations", f"{x.text}, {y.text} on {s.text}")
    return _passed("bracket_relations")


def grade_shift(ctx: PropertyContext) -> PropertyOutcome:
    symbols = _operator_symbols(ctx.N, range(-3, 3))
    for s in _basis_states(ctx, 3):
        k, l = s.grade()
        for x in symbols:
            image = apply_mode(x, s)
            if image and image.grade() != (k + x.shift, l + x.species.charge):
                return _failed("grade_shift", f"{x.text} on {s.text}")
    return _passed("grade_shift")


def translate_grade(ctx: PropertyContext) -> PropertyOutcome:
    for s in _basis_states(ctx, 4):
        k, l = s.grade()
        image = translate(s)
        if image and image.grade() != (k + 1, l):
            return _failed("translate_grade", s.text)
    return _passed("translate_grade")


# ---------------------------------------------------------------------------
# vertex
# ---------------------------------------------------------------------------

def creation_identity(ctx: PropertyContext) -> PropertyOutcome:
    vacuum = State.vacuum(ctx.N)
    for s in _basis_states(ctx, 3):
        if nth_product(s, -1, vacuum) != s:
            return _failed("creation_identity", s.text)
    return _passed("creation_identity")


def conformal_weight_diagonal(ctx: PropertyContext) -> PropertyOutcome:
    L = generator_state("L", ctx.N)
    J = generator_state("J", ctx.N)
    for ws in _spaces(ctx, 3):
        for name, state, mode, eigenvalue in (("L_(1)", L, 1, ws.k), ("J_(0)", J, 0, ws.l)):
            m = composite_mode(state, mode, ws)
            expected = {i: {i: Fraction(eigenvalue)} for i in range(ws.dim)} if eigenvalue else {}
            if m.entries() != expected:
                return _failed("conformal_weight_diagonal", f"{name} at grade {ws.grade}")
    return _passed("conformal_weight_diagonal")


def derivative_compatibility(ctx: PropertyContext) -> PropertyOutcome:
    generators = [generator_state(name, ctx.N) for name in generator_names(ctx.algebra)]
    for a in generators:
        da = translate(a)
        for b in _basis_states(ctx, 2):
            for n in range(0, 3):
                if nth_product(da, n, b) != nth_product(a, n - 1, b) * (-n):
                    return _failed("derivative_compatibility", f"({a.text}) at n={n} on {b.text}")
    return _passed("derivative_compatibility")


def _generator_set(N: int) -> List[GeneratorName]:
    """Type A generators, plus D′ and E′ when N is even"""
    names = set(generator_names(AlgebraType.A))
    if N % 2 == 0:
        names |= set(generator_names(AlgebraType.C))
    return [name for name in GeneratorName if name in names]


def _mode_window(generator_weight: int, weight: int, cap: int) -> range:
    # modes taking weight `weight` into weights 0..cap
    return range(weight + generator_weight - 1 - cap, weight + generator_weight)


def commutator_formula(ctx: PropertyContext) -> PropertyOutcome:
    cap = min(ctx.k_max, 3)
    generators = [generator_state(name, ctx.N) for name in _generator_set(ctx.N)]
    modes: Dict[Tuple[str, int, Grade], SparseLinearMap] = {}

    def mode_map(state: State, n: int, ws: WeightSpace) -> SparseLinearMap:
        key = (state.text, n, ws.grade)
        if key not in modes:
            modes[key] = composite_mode(state, n, ws)
        return modes[key]

    pairs = []
    for a, b in itertools.product(generators, repeat=2):
        ga, gb = a.grade(), b.grade()
        sign = -1 if ga.l % 2 and gb.l % 2 else 1
        products = [nth_product(a, j, b) for j in range(ga.k + gb.k)]
        pairs.append((a, b, sign, products))

    for ws in _spaces(ctx, cap):
        for a, b, sign, products in pairs:
            ka, kb = a.grade().k, b.grade().k
            for m in _mode_window(ka, ws.k, cap):
                for n in _mode_window(kb, ws.k, cap):
                    if not 0 <= ws.k + (ka - m - 1) + (kb - n - 1) <= cap:
                        continue
                    first_b, first_a = mode_map(b, n, ws), mode_map(a, m, ws)
                    lhs = mode_map(a, m, first_b.target).after(first_b)
                    lhs = lhs - mode_map(b, n, first_a.target).after(first_a).scaled(sign)
                    rhs = SparseLinearMap.from_columns(ws, lhs.target, ({} for _ in ws.basis))
                    for j, ab in enumerate(products):
                        coefficient = generalized_binomial(m, j)
                        if not coefficient:
                            continue
                        for part in ab.components().values():
                            rhs = rhs + mode_map(part, m + n - j, ws).scaled(coefficient)
                    if lhs.entries() != rhs.entries():
                        return _failed("commutator_formula", f"[({a.text})_({m}), ({b.text})_({n})] at grade {ws.grade}")
    return _passed("commutator_formula")


# ---------------------------------------------------------------------------
# vecfields
# ---------------------------------------------------------------------------

def jacobi(ctx: PropertyContext) -> PropertyOutcome:
    rng = ctx.rng("jacobi")
    degrees = [n for n in range(3) if basis_graded(ctx.algebra, ctx.N, n)]
    if not degrees:
        return PropertyOutcome("jacobi", SKIP, "no nonzero graded pieces")
    for _ in range(50):
        u, v, w = (random_element(ctx.algebra, ctx.N, rng.choice(degrees), rng) for _ in range(3))
        total = bracket(u, bracket(v, w)) + bracket(v, bracket(w, u)) + bracket(w, bracket(u, v))
        if not total.is_zero:
            return _failed("jacobi", f"{u.text} ; {v.text} ; {w.text}")
    return _passed("jacobi")


def closure(ctx: PropertyContext) -> PropertyOutcome:
    for n, m in ((0, 0), (0, 1), (1, 1), (0, 2)):
        target = basis_graded(ctx.algebra, ctx.N, n + m)
        produced = [bracket(u, v) for u in basis_graded(ctx.algebra, ctx.N, n) for v in basis_graded(ctx.algebra, ctx.N, m)]
        if span_rank(list(target) + produced, ctx.N, n + m) != len(target):
            return _failed("closure", f"degrees {n} and {m}")
    return _passed("closure")


def dimension_formulas(ctx: PropertyContext) -> PropertyOutcome:
    cases = [(AlgebraType.A, N) for N in range(1, 5)] + [(AlgebraType.C, N) for N in (2, 4)]
    for algebra, N in cases:
        for n in range(4):
            dim = len(basis_graded(algebra, N, n))
            if dim != expected_dimension(algebra, N, n):
                return _failed("dimension_formulas", f"type {algebra.value}, N={N}, n={n}: {dim}")
    return _passed("dimension_formulas")


def generation(ctx: PropertyContext) -> PropertyOutcome:
    if ctx.N < 2:
        return PropertyOutcome("generation", SKIP, "needs N >= 2")
    report = generation_check(ctx.algebra, ctx.N, 3 if ctx.N <= 2 else 2)
    for row in report.rows:
        if not row.full:
            return _failed("generation", f"degree {row.n}: rank {row.achieved_rank} of {row.expected_dim}")
    return _passed("generation")


# ---------------------------------------------------------------------------
# action
# ---------------------------------------------------------------------------

def grade_preservation(ctx: PropertyContext) -> PropertyOutcome:
    fields = [v for n in range(3) for v in basis_graded(ctx.algebra, ctx.N, n)]
    for ws in _spaces(ctx, 2):
        for v in fields:
            try:
                action_operator(v, Variant.LPLUS).matrix(ws)
            except FreeFieldError as exc:
                return _failed("grade_preservation", f"{v.text} at grade {ws.grade}: {exc}")
    return _passed("grade_preservation")


def _low_degree_fields(ctx: PropertyContext) -> List[PolyVectorField]:
    return list(basis_graded(ctx.algebra, ctx.N, 0)) + list(basis_graded(ctx.algebra, ctx.N, 1))


def lie_homomorphism(ctx: PropertyContext) -> PropertyOutcome:
    fields = _low_degree_fields(ctx)
    brackets = {(u.text, v.text): bracket(u, v) for u, v in itertools.combinations(fields, 2)}
    for ws in _spaces(ctx, 2, Flavor.FULL, 2):
        for s in ws.basis_states():
            images = {v.text: act_L(v, s) for v in fields}
            for u, v in itertools.combinations(fields, 2):
                lhs = act_L(u, images[v.text]) - act_L(v, images[u.text])
                if lhs != act_L(brackets[(u.text, v.text)], s):
                    return _failed("lie_homomorphism", f"[{u.text}, {v.text}] on {s.text}")
    return _passed("lie_homomorphism")


def _random_full_state(ctx: PropertyContext, rng: random.Random) -> State:
    spaces = list(_spaces(ctx, 2, Flavor.FULL, 2))
    ws = rng.choice(spaces)
    picks = rng.sample(range(ws.dim), min(ws.dim, 3))
    return ws.state_of({i: Fraction(rng.randint(1, 5)) for i in picks})


def taylor_expansion_identity(ctx: PropertyContext) -> PropertyOutcome:
    if ctx.N < 2:
        return PropertyOutcome("taylor_expansion_identity", SKIP, "needs N >= 2")
    rng = ctx.rng("taylor_expansion_identity")
    v = default_g1(ctx.N)
    lplus = action_operator(v, Variant.LPLUS)
    for _ in range(10):
        s = _random_full_state(ctx, rng)
        if act_L(v, s) != expand_L_via_Lplus(v, s):
            return _failed("taylor_expansion_identity", f"L({v.text}) on {s.text}")
        if lplus.apply(s) != expand_Lplus_via_L(v, s):
            return _failed("taylor_expansion_identity", f"L+({v.text}) on {s.text}")
    return _passed("taylor_expansion_identity")


def g0_action_agreement(ctx: PropertyContext) -> PropertyOutcome:
    g0 = basis_graded(ctx.algebra, ctx.N, 0)
    for s in _basis_states(ctx, 3):
        for v in g0:
            if act_Lplus(v, s) != act_L(v, s):
                return _failed("g0_action_agreement", f"{v.text} on {s.text}")
    return _passed("g0_action_agreement")


def arc_bracket_relations(ctx: PropertyContext) -> PropertyOutcome:
    g0 = basis_graded(ctx.algebra, ctx.N, 0)
    for s in _basis_states(ctx, 3):
        for g, h in itertools.combinations(g0, 2):
            for i, j in ((0, 1), (1, 1), (1, 2)):
                if not arc_bracket_check(ArcActionElement(g, i), ArcActionElement(h, j), s):
                    return _failed("arc_bracket_relations", f"[{g.text} t^{i}, {h.text} t^{j}] on {s.text}")
    return _passed("arc_bracket_relations")


def k_operator_identities(ctx: PropertyContext) -> PropertyOutcome:
    if ctx.N != 2:
        return PropertyOutcome("k_operator_identities", SKIP, "K operators are defined for N = 2")
    K0, K2 = k_operator(0), k_operator(2)
    g1 = PolyVectorField.from_text(G1_FIELD, 2)
    for s in _basis_states(ctx, 2):
        for l in range(2, 7):
            gamma = ModeSymbol(Species.GAMMA, 1, -l)
            lhs = K0.apply(apply_mode(gamma, s)) - apply_mode(gamma, K0.apply(s))
            if lhs != k0_gamma_commutator(l, s):
                return _failed("k_operator_identities", f"[K0, gamma{{1,{-l}}}] on {s.text}")
        for j in range(1, 4):
            arc = ArcActionElement(g1, j)
            lhs = K0.apply(act_arc(arc, s)) - act_arc(arc, K0.apply(s))
            if lhs != k0_arc_commutator(j, s):
                return _failed("k_operator_identities", f"[K0, g1 t^{j}] on {s.text}")
    for s in _basis_states(ctx, 3):
        if K2.apply(s) != k2_closed_form(s):
            return _failed("k_operator_identities", f"K2 on {s.text}")
    return _passed("k_operator_identities")


# ---------------------------------------------------------------------------
# hermitian
# ---------------------------------------------------------------------------

def positive_definite(ctx: PropertyContext) -> PropertyOutcome:
    for ws in _spaces(ctx, 4):
        if not gram_matrix(ws).is_positive_definite:
            return _failed("positive_definite", f"grade {ws.grade}")
    return _passed("positive_definite")


def adjoint_relations(ctx: PropertyContext) -> PropertyOutcome:
    k_max = min(ctx.k_max, 3)
    families = [AdjointFamily.Q, AdjointFamily.J, AdjointFamily.L, AdjointFamily.D]
    if ctx.N % 2 == 0:
        families.append(AdjointFamily.DP)
    for family in families:
        report = adjoint_check(family, ctx.N, k_max, flip_sign=ctx.inject_sign_flip)
        if not report.passed:
            failure = report.failure
            return _failed("adjoint_relations", f"{failure.family} mode {failure.mode} at grade {failure.grade}: {failure.witness}")
    report = single_mode_adjoint_check(ctx.N, k_max)
    if not report.passed:
        failure = report.failure
        return _failed("adjoint_relations", f"{failure.family} mode {failure.mode} at grade {failure.grade}: {failure.witness}")
    return _passed("adjoint_relations")


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def invariants_match_generated_algebra(ctx: PropertyContext) -> PropertyOutcome:
    k_max = min(ctx.k_max, 3)
    span = oracle_span(ctx.algebra, ctx.N, k_max)
    for k in range(k_max + 1):
        for l in grade_range(ctx.N, k):
            report = invariant_space(ctx.algebra, ctx.N, k, l, oracle=span)
            if not report.oracle_contained:
                return _failed("invariants_match_generated_algebra", f"generated span not invariant at ({k},{l})")
            if ctx.N == 2 and not report.matches_oracle:
                return _failed(
                    "invariants_match_generated_algebra",
                    f"grade ({k},{l}): invariants {report.dim_full_invariants}, generated {report.dim_oracle_span}",
                )
    return _passed("invariants_match_generated_algebra")


def reduction_equivalence(ctx: PropertyContext) -> PropertyOutcome:
    if ctx.N < 2:
        return PropertyOutcome("reduction_equivalence", SKIP, "needs N >= 2")
    rng = ctx.rng("reduction_equivalence")
    choices = [random_element(ctx.algebra, ctx.N, 1, rng) for _ in range(5)]
    for k in ctx.weights(2):
        for l in grade_range(ctx.N, k):
            report = invariant_space(ctx.algebra, ctx.N, k, l, cross_check=True)
            if report.dim_all_degrees != report.dim_full_invariants:
                return _failed(
                    "reduction_equivalence",
                    f"grade ({k},{l}): one element {report.dim_full_invariants}, all degrees {report.dim_all_degrees}",
                )
            for v in choices:
                other = invariant_space(ctx.algebra, ctx.N, k, l, g1_choice=v)
                if other.dim_full_invariants != report.dim_full_invariants:
                    return _failed("reduction_equivalence", f"grade ({k},{l}) depends on the choice {v.text}")
    return _passed("reduction_equivalence")


def generator_annihilation_check(ctx: PropertyContext) -> PropertyOutcome:
    failures = generator_annihilation(ctx.algebra, ctx.N)
    if failures:
        return _failed("generator_annihilation", failures[0])
    return _passed("generator_annihilation")


def top_degree_arc_invariance(ctx: PropertyContext) -> PropertyOutcome:
    for k in ctx.weights(3):
        for l in grade_range(ctx.N, k):
            failures = top_degree_check(invariant_space(ctx.algebra, ctx.N, k, l))
            if failures:
                return _failed("top_degree_arc_invariance", failures[0])
    return _passed("top_degree_arc_invariance")


PROPERTIES: Dict[str, Callable[[PropertyContext], PropertyOutcome]] = {
    "character_identity": character_identity,
    "bracket_relations": bracket_relations,
    "grade_shift": grade_shift,
    "translate_grade": translate_grade,
    "creation_identity": creation_identity,
    "conformal_weight_diagonal": conformal_weight_diagonal,
    "derivative_compatibility": derivative_compatibility,
    "commutator_formula": commutator_formula,
    "jacobi": jacobi,
    "closure": closure,
    "dimension_formulas": dimension_formulas,
    "generation": generation,
    "grade_preservation": grade_preservation,
    "lie_homomorphism": lie_homomorphism,
    "taylor_expansion_identity": taylor_expansion_identity,
    "g0_action_agreement": g0_action_agreement,
    "arc_bracket_relations": arc_bracket_relations,
    "k_operator_identities": k_operator_identities,
    "positive_definite": positive_definite,
    "adjoint_relations": adjoint_relations,
    "invariants_match_generated_algebra": invariants_match_generated_algebra,
    "reduction_equivalence": reduction_equivalence,
    "generator_annihilation": generator_annihilation_check,
    "top_degree_arc_invariance": top_degree_arc_invariance,
}


def run_properties(ctx: PropertyContext, names: Optional[Sequence[str]] = None) -> List[PropertyOutcome]:
    selected = list(PROPERTIES) if not names else list(names)
    unknown = [name for name in selected if name not in PROPERTIES]
    if unknown:
        raise FreeFieldError(f"Unknown properties: {', '.join(unknown)}")
    outcomes = []
    for name in PROPERTIES:
        if name not in selected:
            continue
        outcome = PROPERTIES[name](ctx)
        logger.info("%s %s", "✅" if outcome.passed else "❌", name)
        outcomes.append(outcome)
    return outcomes
