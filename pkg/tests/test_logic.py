import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regionlogic import (
    TRUE,
    And,
    EmptyStateSetError,
    Literal,
    LiteralRangeError,
    Or,
    StateVector,
    TruthTableLimitError,
    conjunction,
    disjunction,
    equivalent,
    evaluate,
    expr_from_json,
    expr_to_json,
    literal_count,
    render,
    translate,
)
from regionlogic.logic import eval_bits


def lit(*regions):
    return [Literal(r) for r in regions]


class TestTranslate:
    def test_worked_example_is_equivalent_to_factored_form(self):
        expr = translate([{1, 2, 3, 5}, {1, 2, 3, 6}, {1, 4}])
        hand = conjunction(
            [
                Literal(1),
                disjunction(
                    [
                        Literal(4),
                        conjunction(
                            [Literal(2), Literal(3), disjunction(lit(5, 6))]
                        ),
                    ]
                ),
            ]
        )
        assert equivalent(expr, hand, 6)

    def test_two_states_sharing_one_region(self):
        expr = translate([{1, 2}, {1, 3}])
        assert expr == And((Literal(1), Or((Literal(2), Literal(3)))))
        assert render(expr) == "I1 & (I2 | I3)"

    def test_singleton_and_empty_state(self):
        assert translate([{2}]) == Literal(2)
        assert translate([set()]) == TRUE

    def test_empty_set_rejected(self):
        with pytest.raises(EmptyStateSetError):
            translate([])

    def test_deterministic_for_equal_sets(self):
        a = translate([{2, 4}, {3, 4}, {1}])
        b = translate([{1}, {3, 4}, {2, 4}])
        assert a == b

    def test_accepts_state_vectors(self):
        states = [StateVector.from_regions([1, 2], 3), StateVector.from_regions([1, 3], 3)]
        assert translate(states) == translate([{1, 2}, {1, 3}])

    def test_duplicate_states_collapse(self):
        assert translate([{1, 2}, {1, 2}]) == translate([{1, 2}])


def _supersets_some(bits, index_sets):
    return any(all(bits >> (i - 1) & 1 for i in s) for s in index_sets)


@st.composite
def state_sets(draw):
    m = draw(st.integers(min_value=1, max_value=7))
    n = draw(st.integers(min_value=1, max_value=6))
    sets = draw(
        st.lists(
            st.frozensets(st.integers(min_value=1, max_value=m)),
            min_size=n,
            max_size=n,
        )
    )
    return m, set(sets)


@given(state_sets())
@settings(max_examples=200)
def test_translate_has_dnf_semantics(case):
    m, sets = case
    expr = translate(sets)
    for bits in range(1 << m):
        assert eval_bits(expr, bits, m) == _supersets_some(bits, sets)


def test_translate_dnf_semantics_exhaustive_m12():
    rng = __import__("random").Random(3)
    m = 12
    sets = {frozenset(i for i in range(1, m + 1) if rng.random() < 0.3) for _ in range(5)}
    expr = translate(sets)
    for bits in range(1 << m):
        assert eval_bits(expr, bits, m) == _supersets_some(bits, sets)


@given(state_sets())
def test_factoring_never_duplicates_literals(case):
    _, sets = case
    expr = translate(sets)
    assert literal_count(expr) <= sum(len(s) for s in sets)


class TestEvaluate:
    def test_true_everywhere(self):
        assert evaluate(TRUE, StateVector.empty(3))
        assert evaluate(TRUE, StateVector.full(3))

    def test_literal(self):
        assert not evaluate(Literal(2), StateVector.empty(4))
        assert evaluate(Literal(2), StateVector.from_regions([2], 4))

    def test_out_of_range_literal(self):
        with pytest.raises(LiteralRangeError):
            evaluate(Literal(5), StateVector.full(4))

    def test_worked_example_truth_values(self):
        expr = translate([{1, 2, 3, 5}, {1, 2, 3, 6}, {1, 4}])
        assert evaluate(expr, StateVector.from_regions([1, 4], 6))
        assert not evaluate(expr, StateVector.from_regions([1, 2, 3], 6))


class TestEquivalent:
    def test_commutativity(self):
        assert equivalent(disjunction(lit(2, 3)), disjunction(lit(3, 2)), 3)

    def test_and_is_not_or(self):
        assert not equivalent(conjunction(lit(1, 2)), disjunction(lit(1, 2)), 2)

    def test_region_limit(self):
        with pytest.raises(TruthTableLimitError):
            equivalent(TRUE, TRUE, 21)


class TestRender:
    def test_nested_parentheses(self):
        expr = And((Literal(1), Or((Literal(2), Literal(3)))))
        assert render(expr) == "I1 & (I2 | I3)"

    def test_true(self):
        assert render(TRUE) == "TRUE"

    def test_root_composite_has_no_outer_parens(self):
        assert render(Or((Literal(1), Literal(2)))) == "I1 | I2"


class TestCanonicalization:
    def test_nested_same_operator_flattens(self):
        expr = conjunction([Literal(2), conjunction(lit(1, 3))])
        assert expr == And((Literal(1), Literal(2), Literal(3)))

    def test_true_is_and_identity(self):
        assert conjunction([Literal(1), TRUE]) == Literal(1)
        assert conjunction([TRUE]) == TRUE

    def test_true_absorbs_or(self):
        assert disjunction([Literal(1), TRUE]) == TRUE

    def test_single_child_collapses(self):
        assert conjunction([Literal(4)]) == Literal(4)
        assert disjunction([Literal(4), Literal(4)]) == Literal(4)

    def test_raw_constructors_reject_short_children(self):
        with pytest.raises(ValueError):
            And((Literal(1),))
        with pytest.raises(ValueError):
            Or((Literal(1),))


def test_json_roundtrip():
    expr = translate([{1, 2, 3, 5}, {1, 2, 3, 6}, {1, 4}])
    doc = expr_to_json(expr)
    assert expr_from_json(doc) == expr
    assert expr_to_json(TRUE) == {"op": "true"}
    assert expr_from_json({"op": "lit", "region": 3}) == Literal(3)
    with pytest.raises(ValueError):
        expr_from_json({"op": "xor"})
