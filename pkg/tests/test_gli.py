"""Drawing engine: syntax checks, state derivation, stop conditions, variants."""

import pytest
from hypothesis import given, strategies as st

from gligrade.expressions import BLANK, BinOp, BoolLit, Lit, Var, parse_expression, pretty
from gligrade.gli import (
    GliEvalError,
    LoopTrace,
    check_variant,
    derive_state,
    derive_stop_condition,
    validate_gli_syntax,
)
from gligrade.model import DescriptorMismatch, FilledGli

from test_model import product_descriptor


def golden_gli(**overrides):
    fields = dict(
        descriptor_ref="d1",
        red_assignments={1: "p", 3: ""},
        green_assignments={2: "opt-product", 4: "opt-remaining"},
        bar_positions={"left": "lo", "cursor": "i", "right": "hi"},
    )
    fields.update(overrides)
    return FilledGli(**fields)


class TestSyntax:
    def test_golden_is_clean(self):
        assert validate_gli_syntax(golden_gli(), product_descriptor()) == []

    def test_constant_bounds_out_of_order(self):
        g = golden_gli(bar_positions={"left": "5", "cursor": "i", "right": "2"})
        # left vs cursor and cursor vs right are symbolic: only left/right
        # ordering cannot fire... but left=5 and right=2 are not consecutive.
        issues = validate_gli_syntax(g, product_descriptor())
        assert [i.code for i in issues] == []

        g = golden_gli(bar_positions={"left": "5", "cursor": "3", "right": "hi"})
        issues = validate_gli_syntax(g, product_descriptor())
        assert [i.code for i in issues] == ["GLI_BOUNDS_ORDER"]

    def test_symbolic_bounds_never_flagged(self):
        g = golden_gli(bar_positions={"left": "hi", "cursor": "i", "right": "lo"})
        assert validate_gli_syntax(g, product_descriptor()) == []

    def test_bound_boxes_out_of_order(self):
        # lower-bound box "5", upper-bound box "2": the one mistake reported
        from gligrade import fixtures

        g = fixtures.golden_gli(red={5: "5", 6: "2"})
        issues = validate_gli_syntax(g, fixtures.product_descriptor())
        assert [i.code for i in issues] == ["GLI_BOUNDS_ORDER"]
        # symbolic bounds stay silent
        assert validate_gli_syntax(fixtures.golden_gli(), fixtures.product_descriptor()) == []

    def test_achieved_label_missing(self):
        g = golden_gli(green_assignments={4: "opt-remaining"})
        issues = validate_gli_syntax(g, product_descriptor())
        assert [i.code for i in issues] == ["GLI_ACHIEVED_MISSING"]

    def test_other_green_missing(self):
        g = golden_gli(green_assignments={2: "opt-product"})
        issues = validate_gli_syntax(g, product_descriptor())
        assert [i.code for i in issues] == ["GLI_GREEN_MISSING"]

    def test_required_red_blank(self):
        g = golden_gli(red_assignments={1: "", 3: ""})
        issues = validate_gli_syntax(g, product_descriptor())
        assert [i.code for i in issues] == ["GLI_RED_BLANK_REQUIRED"]

    def test_unparseable_red(self):
        g = golden_gli(red_assignments={1: "p +", 3: ""})
        issues = validate_gli_syntax(g, product_descriptor())
        assert [i.code for i in issues] == ["GLI_RED_UNPARSED"]

    def test_unknown_box_raises(self):
        g = golden_gli(red_assignments={9: "p"})
        with pytest.raises(DescriptorMismatch):
            validate_gli_syntax(g, product_descriptor())

    @given(st.sampled_from(["p", "p * i", "lo + hi", "n"]))
    def test_insensitive_to_red_content(self, replacement):
        # swapping one parseable non-blank red expression for another
        # changes nothing: no semantics is judged here
        baseline = validate_gli_syntax(golden_gli(), product_descriptor())
        swapped = validate_gli_syntax(
            golden_gli(red_assignments={1: replacement, 3: ""}), product_descriptor()
        )
        assert [i.code for i in swapped] == [i.code for i in baseline]


class TestDeriveState:
    def test_initial_representation(self):
        # processed region empty: cursor sits on the lower bound
        state = derive_state(golden_gli(), {"lo": 1, "hi": 4, "i": 1, "p": 1})
        assert state.bar_values == {"left": 1, "cursor": 1, "right": 4}
        assert state.boxes_evaluated == {1: 1}

    def test_final_representation(self):
        state = derive_state(golden_gli(), {"lo": 1, "hi": 4, "i": 5, "p": 24})
        assert state.bar_values["cursor"] == 5  # one past the upper bound

    def test_missing_binding(self):
        with pytest.raises(GliEvalError) as exc:
            derive_state(golden_gli(), {"lo": 1, "i": 1, "p": 1})
        assert exc.value.location == "bar 'right'"
        assert exc.value.code == "UNBOUND_VARIABLE"

    @given(
        st.fixed_dictionaries(
            {n: st.integers(min_value=-100, max_value=100) for n in ("lo", "hi", "i", "p")}
        )
    )
    def test_bar_values_match_pointwise_eval(self, binding):
        from gligrade.expressions import eval_expression

        g = golden_gli()
        state = derive_state(g, binding)
        for bar_id, text in g.bar_positions.items():
            assert state.bar_values[bar_id] == eval_expression(
                parse_expression(text), binding
            )


class TestStopCondition:
    def test_single_bar(self):
        g = golden_gli()
        stop = derive_stop_condition(g, {"cursor": "hi + 1"}, product_descriptor())
        assert stop == BinOp("=", Var("i"), BinOp("+", Var("hi"), Lit(1)))
        assert pretty(stop) == "i = hi + 1"

    def test_empty_spec_is_true(self):
        stop = derive_stop_condition(golden_gli(), {}, product_descriptor())
        assert stop == BoolLit(True)

    def test_conjunction_in_bar_order(self):
        g = golden_gli()
        stop = derive_stop_condition(
            g, {"cursor": "hi + 1", "left": "lo"}, product_descriptor()
        )
        assert stop == BinOp(
            "and",
            BinOp("=", Var("lo"), Var("lo")),
            BinOp("=", Var("i"), BinOp("+", Var("hi"), Lit(1))),
        )

    def test_unknown_bar(self):
        with pytest.raises(DescriptorMismatch):
            derive_stop_condition(golden_gli(), {"ghost": "0"}, product_descriptor())

    def test_normalization_folds_constants(self):
        g = golden_gli(bar_positions={"left": "1 + 1", "cursor": "i", "right": "hi"})
        stop = derive_stop_condition(g, {"left": "2"}, product_descriptor())
        assert stop == BoolLit(True)


def product_trace(lo, hi):
    """Trace of the counting loop for the product program: i runs lo..hi+1."""
    snaps = []
    p = 1
    for i in range(lo, hi + 2):
        snaps.append({"lo": lo, "hi": hi, "i": i, "p": p})
        if i <= hi:
            p *= i
    return LoopTrace(tuple(snaps))


class TestVariant:
    def test_remaining_count_passes(self):
        # v = hi - i + 1 over i = 1..5 gives 4,3,2,1,0
        v = parse_expression("hi - i + 1")
        assert check_variant(v, product_trace(1, 4)) == []

    def test_increasing_variant(self):
        issues = check_variant(parse_expression("i"), product_trace(1, 4))
        assert [(i.code, i.detail) for i in issues] == [
            ("VARIANT_NOT_DECREASING", "1"),
            ("VARIANT_NONZERO_AT_EXIT", "5"),
        ]

    def test_zero_iteration_loop(self):
        trace = LoopTrace(({"i": 3, "hi": 2},))
        assert check_variant(parse_expression("hi - i + 1"), trace) == []
        assert check_variant(Lit(0), trace) == []

    def test_negative_before_exit(self):
        trace = LoopTrace(({"v": 2}, {"v": -1}, {"v": -3}))
        issues = check_variant(parse_expression("v"), trace)
        assert [i.code for i in issues] == [
            "VARIANT_NEGATIVE",
            "VARIANT_NONZERO_AT_EXIT",
        ]

    def test_eval_error(self):
        issues = check_variant(parse_expression("ghost"), product_trace(1, 2))
        assert [i.code for i in issues] == ["VARIANT_EVAL_ERROR"]

    def test_blank_variant(self):
        assert check_variant(BLANK, product_trace(1, 2))[0].code == "VARIANT_EVAL_ERROR"

    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=6))
    def test_reversed_passing_trace_fails(self, lo, span):
        hi = lo + span
        trace = product_trace(lo, hi)
        v = parse_expression("hi - i + 1")
        assert check_variant(v, trace) == []
        reversed_trace = LoopTrace(tuple(reversed(trace.snapshots)))
        codes = [i.code for i in check_variant(v, reversed_trace)]
        assert "VARIANT_NOT_DECREASING" in codes

    def test_trace_invariants(self):
        with pytest.raises(ValueError):
            LoopTrace(())
        with pytest.raises(ValueError):
            LoopTrace(({"a": 1}, {"b": 2}))


def test_state_and_trace_json():
    from gligrade.gli import state_to_doc, trace_from_doc, trace_to_doc

    trace = product_trace(1, 2)
    assert trace_from_doc(trace_to_doc(trace)) == trace

    state = derive_state(golden_gli(), {"lo": 1, "hi": 4, "i": 1, "p": 1})
    doc = state_to_doc(state)
    assert doc["bar-values"] == {"cursor": 1, "left": 1, "right": 4}
    assert doc["boxes-evaluated"] == {"1": 1}
