"""Domain model: flow validation, descriptor invariants, JSON round trips."""

from datetime import datetime, timezone
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gligrade.model import (
    Bar,
    BlankGliDescriptor,
    Box,
    BoxColor,
    DescriptorMismatch,
    FilledGli,
    GliElement,
    LabelOption,
    Phase,
    Production,
    ProductionKind,
    ResolutionFlow,
    RuleBinding,
    Statement,
    Submission,
    TestCase,
    Window,
    canonical_json,
    filled_gli_from_doc,
    filled_gli_to_doc,
    format_instant,
    format_rational,
    parse_instant,
    parse_rational,
    statement_from_doc,
    statement_to_doc,
    submission_from_doc,
    submission_to_doc,
    validate_descriptor,
    validate_filled_gli,
    validate_resolution_flow,
    validate_statement,
)


def cs1_flow():
    """The five-step flow: drawing, initial, final, variant, code."""
    return ResolutionFlow(
        productions=(
            Production("gli", ProductionKind.GLI, Phase.ABSTRACTION, 1, 4),
            Production("init", ProductionKind.INITIAL_REPRESENTATION, Phase.BRIDGE, 2, 2),
            Production("final", ProductionKind.FINAL_REPRESENTATION, Phase.BRIDGE, 3, 2),
            Production("variant", ProductionKind.VARIANT_FUNCTION, Phase.BRIDGE, 4, 2),
            Production("code", ProductionKind.CODE, Phase.CONCRETE, 5, 10),
        ),
        locks=(("code", "gli"),),
    )


class TestFlowValidation:
    def test_cs1_flow_ok(self):
        assert validate_resolution_flow(cs1_flow()).ok

    def test_empty(self):
        result = validate_resolution_flow(ResolutionFlow(productions=()))
        assert result.codes() == ["FLOW_EMPTY"]

    def test_phase_order(self):
        flow = ResolutionFlow(
            productions=(
                Production("c", ProductionKind.CODE, Phase.CONCRETE, 1, 1),
                Production("a", ProductionKind.GENERIC, Phase.ABSTRACTION, 2, 1),
            )
        )
        assert "FLOW_PHASE_ORDER" in validate_resolution_flow(flow).codes()

    def test_order_gap(self):
        flow = ResolutionFlow(
            productions=(
                Production("a", ProductionKind.GENERIC, Phase.ABSTRACTION, 1, 1),
                Production("b", ProductionKind.GENERIC, Phase.CONCRETE, 3, 1),
            )
        )
        assert "FLOW_ORDER_NOT_CONTIGUOUS" in validate_resolution_flow(flow).codes()

    def test_kind_phase(self):
        flow = ResolutionFlow(
            productions=(
                Production("c", ProductionKind.CODE, Phase.ABSTRACTION, 1, 1),
            )
        )
        assert "FLOW_KIND_PHASE" in validate_resolution_flow(flow).codes()

    def test_lock_direction(self):
        flow = ResolutionFlow(
            productions=(
                Production("a", ProductionKind.GENERIC, Phase.ABSTRACTION, 1, 1),
                Production("b", ProductionKind.GENERIC, Phase.CONCRETE, 2, 1),
            ),
            locks=(("a", "b"),),
        )
        assert "FLOW_LOCK_ORDER" in validate_resolution_flow(flow).codes()

    def test_lock_unknown(self):
        flow = ResolutionFlow(
            productions=(
                Production("a", ProductionKind.GENERIC, Phase.ABSTRACTION, 1, 1),
            ),
            locks=(("a", "ghost"),),
        )
        assert "FLOW_LOCK_UNKNOWN" in validate_resolution_flow(flow).codes()

    def test_duplicate_id(self):
        flow = ResolutionFlow(
            productions=(
                Production("a", ProductionKind.GENERIC, Phase.ABSTRACTION, 1, 1),
                Production("a", ProductionKind.GENERIC, Phase.CONCRETE, 2, 1),
            )
        )
        assert "FLOW_DUPLICATE_ID" in validate_resolution_flow(flow).codes()

    def test_purity(self):
        flow = cs1_flow()
        assert validate_resolution_flow(flow) == validate_resolution_flow(flow)


def product_descriptor():
    return BlankGliDescriptor(
        id="d1",
        elements=(
            GliElement("range", "range", "the input values"),
            GliElement("processed", "region", "already handled"),
            GliElement("remaining", "region", "still to handle"),
        ),
        boxes=(
            Box(1, BoxColor.RED, "processed", required=True),
            Box(2, BoxColor.GREEN, "processed", role="achieved"),
            Box(3, BoxColor.RED, "remaining"),
            Box(4, BoxColor.GREEN, "remaining"),
        ),
        bars=(
            Bar("left", "range", 0),
            Bar("cursor", "range", 1),
            Bar("right", "range", 2),
        ),
    )


class TestDescriptor:
    def test_ok(self):
        assert validate_descriptor(product_descriptor()).ok

    def test_box_numbers_contiguous(self):
        d = product_descriptor()
        bad = BlankGliDescriptor(d.id, d.elements, d.boxes[:-1] + (Box(7, BoxColor.GREEN, "remaining"),), d.bars)
        assert "GLI_DESC_BOX_NUMBERS" in validate_descriptor(bad).codes()

    def test_needs_a_bar(self):
        d = product_descriptor()
        bad = BlankGliDescriptor(d.id, d.elements, d.boxes, ())
        assert "GLI_DESC_NO_BARS" in validate_descriptor(bad).codes()

    def test_green_anchor_must_exist(self):
        d = product_descriptor()
        boxes = d.boxes[:1] + (Box(2, BoxColor.GREEN, "nowhere", role="achieved"),) + d.boxes[2:]
        bad = BlankGliDescriptor(d.id, d.elements, boxes, d.bars)
        assert "GLI_DESC_ANCHOR" in validate_descriptor(bad).codes()


class TestFilledGli:
    def golden(self):
        return FilledGli(
            descriptor_ref="d1",
            red_assignments={1: "p", 3: ""},
            green_assignments={2: "opt-product", 4: "opt-remaining"},
            bar_positions={"left": "lo", "cursor": "i", "right": "hi"},
        )

    def test_valid(self):
        validate_filled_gli(self.golden(), product_descriptor())

    def test_unknown_box(self):
        g = FilledGli("d1", red_assignments={9: "x"})
        with pytest.raises(DescriptorMismatch):
            validate_filled_gli(g, product_descriptor())

    def test_color_mismatch(self):
        g = FilledGli("d1", red_assignments={2: "x"})  # box 2 is green
        with pytest.raises(DescriptorMismatch):
            validate_filled_gli(g, product_descriptor())

    def test_unknown_option(self):
        g = FilledGli("d1", green_assignments={2: "nope"})
        with pytest.raises(DescriptorMismatch):
            validate_filled_gli(
                g, product_descriptor(), (LabelOption("opt-product", "..."),)
            )

    def test_json_round_trip(self):
        g = self.golden()
        assert filled_gli_from_doc(filled_gli_to_doc(g)) == g

    def test_box_keys_are_decimal_strings(self):
        doc = filled_gli_to_doc(self.golden())
        assert set(doc["red-assignments"]) == {"1", "3"}
        assert set(doc["green-assignments"]) == {"2", "4"}


def golden_statement():
    return Statement(
        id="ch-2",
        title="Product of a range",
        prose="Read lo and hi, print the product of all integers in [lo, hi].",
        flow=cs1_flow(),
        gli=product_descriptor(),
        label_options=(
            LabelOption("opt-product", "product of the values already processed"),
            LabelOption("opt-sum", "sum of the values already processed", distractor=True),
            LabelOption("opt-remaining", "values still to be processed"),
        ),
        code_template="int main(void) {\n}\n",
        test_cases=(TestCase("1 4\n", "24\n"),),
        rubric_bindings=(RuleBinding("E-GLI-BOUNDS", "BoundsOrdered", {}),),
        window=Window(
            opens_at=datetime(2022, 9, 28, 16, 0, tzinfo=timezone.utc),
            closes_at=datetime(2022, 9, 30, 18, 0, tzinfo=timezone.utc),
        ),
        weight_percent=Fraction(2),
        formative_only=False,
    )


class TestStatement:
    def test_valid(self):
        assert validate_statement(golden_statement()).ok

    def test_window_orientation(self):
        st_ = golden_statement()
        bad = Statement(
            **{
                **st_.__dict__,
                "window": Window(st_.window.closes_at, st_.window.opens_at),
            }
        )
        assert "STATEMENT_WINDOW" in validate_statement(bad).codes()

    def test_weight_zero_iff_formative(self):
        st_ = golden_statement()
        bad = Statement(**{**st_.__dict__, "weight_percent": Fraction(0)})
        assert "STATEMENT_WEIGHT_FORMATIVE" in validate_statement(bad).codes()
        ok = Statement(
            **{**st_.__dict__, "weight_percent": Fraction(0), "formative_only": True}
        )
        assert validate_statement(ok).ok

    def test_json_round_trip(self):
        st_ = golden_statement()
        doc = statement_to_doc(st_)
        assert statement_from_doc(doc) == st_
        # stable bytes
        assert canonical_json(doc) == canonical_json(statement_to_doc(statement_from_doc(doc)))


class TestSubmission:
    def test_round_trip(self):
        st_ = golden_statement()
        sub = Submission(
            student_id="s001",
            statement_id="ch-2",
            at=datetime(2022, 9, 28, 17, 0, tzinfo=timezone.utc),
            payloads={
                "gli": TestFilledGli().golden(),
                "init": {"left": "lo", "cursor": "lo", "right": "hi"},
                "final": {"left": "lo", "cursor": "hi+1", "right": "hi"},
                "variant": "hi - i + 1",
                "code": "int main(void) { return 0; }",
            },
            seq=1,
        )
        doc = submission_to_doc(sub)
        assert submission_from_doc(doc, st_.flow) == sub


class TestInstantsAndRationals:
    def test_instant_round_trip(self):
        t = parse_instant("2022-09-28T16:00:00Z")
        assert t == datetime(2022, 9, 28, 16, 0, tzinfo=timezone.utc)
        assert format_instant(t) == "2022-09-28T16:00:00Z"

    def test_instant_offset_normalized(self):
        t = parse_instant("2022-09-28T18:00:00+02:00")
        assert format_instant(t) == "2022-09-28T16:00:00Z"

    def test_naive_rejected(self):
        with pytest.raises(ValueError):
            parse_instant("2022-09-28T16:00:00")

    @pytest.mark.parametrize(
        "raw,expected",
        [(2, Fraction(2)), (2.5, Fraction(5, 2)), ("5/2", Fraction(5, 2))],
    )
    def test_rational_parse(self, raw, expected):
        assert parse_rational(raw) == expected

    def test_rational_format(self):
        assert format_rational(Fraction(2)) == 2
        assert format_rational(Fraction(5, 2)) == "5/2"


@given(
    st.dictionaries(
        st.integers(min_value=1, max_value=9), st.sampled_from(["", "lo", "i + 1"]), max_size=5
    ),
    st.dictionaries(st.sampled_from(["left", "cursor", "right"]), st.sampled_from(["lo", "hi"])),
)
def test_filled_gli_doc_round_trip_property(red, bars):
    g = FilledGli("d1", red_assignments=red, bar_positions=bars)
    assert filled_gli_from_doc(filled_gli_to_doc(g)) == g
