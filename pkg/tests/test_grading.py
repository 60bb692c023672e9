"""Grading pipeline: guard equivalence, grade arithmetic, consistency checks,
and the full correction run over crafted submissions."""

import pytest
from hypothesis import given, settings, strategies as st

from gligrade import fixtures
from gligrade.expressions import BinOp, Lit, Var, parse_expression
from gligrade.grading import (
    Detection,
    PayloadMismatch,
    compute_grade,
    correct_submission,
    guard_equivalent,
    report_to_json,
)
from gligrade.model import Submission
from gligrade.rubric import load_library


@pytest.fixture(scope="module")
def library():
    return load_library(fixtures.LIBRARY_DOC)


@pytest.fixture(scope="module")
def statement():
    return fixtures.golden_statement()


@pytest.fixture(scope="module")
def corpus():
    return fixtures.corpus()


class TestGuardEquivalent:
    def test_negated_spelling(self):
        # 2 variables, 17 values each: the full 289-point enumeration
        result = guard_equivalent(parse_expression("i <= hi"), parse_expression("!(i > hi)"))
        assert result.equivalent

    def test_strict_vs_inclusive(self):
        result = guard_equivalent(parse_expression("i < hi"), parse_expression("i <= hi"))
        assert not result.equivalent
        assert result.witness == {"hi": -8, "i": -8}

    def test_reflexive_on_identical(self):
        e = parse_expression("lo <= i and i <= hi + 1")
        assert guard_equivalent(e, e).equivalent

    def test_eval_error_is_nonequivalence(self):
        result = guard_equivalent(
            parse_expression("1 / n > 0"), parse_expression("n > 0")
        )
        assert not result.equivalent
        assert result.witness == {"n": -8} or result.detail

    def test_constraint_restricts_domain(self):
        a = parse_expression("i <= hi")
        b = parse_expression("i != hi + 1")
        assert not guard_equivalent(a, b).equivalent
        constraint = parse_expression("i <= hi + 1")
        assert guard_equivalent(a, b, constraint=constraint).equivalent


def _bool_exprs():
    arith = st.recursive(
        st.one_of(
            st.integers(min_value=-3, max_value=3).map(Lit),
            st.sampled_from(["i", "hi"]).map(Var),
        ),
        lambda c: st.tuples(st.sampled_from(["+", "-", "*"]), c, c).map(lambda t: BinOp(*t)),
        max_leaves=4,
    )
    cmp_ = st.tuples(st.sampled_from(["<", "<=", ">", ">=", "=", "!="]), arith, arith).map(
        lambda t: BinOp(*t)
    )
    return st.recursive(
        cmp_,
        lambda c: st.tuples(st.sampled_from(["and", "or"]), c, c).map(lambda t: BinOp(*t)),
        max_leaves=3,
    )


@settings(max_examples=60, deadline=None)
@given(_bool_exprs(), _bool_exprs())
def test_guard_equivalence_symmetry(a, b):
    assert guard_equivalent(a, b).equivalent == guard_equivalent(b, a).equivalent


@settings(max_examples=60, deadline=None)
@given(_bool_exprs())
def test_guard_equivalence_reflexivity(a):
    assert guard_equivalent(a, a).equivalent


class TestComputeGrade:
    def test_no_detections_full_marks(self, statement, library):
        earned, total_earned, total_possible, fraction = compute_grade([], statement, library)
        assert (total_earned, total_possible, fraction) == (20, 20, 1.0)
        assert earned == {"gli": 4, "init": 2, "final": 2, "variant": 2, "code": 10}

    def test_single_gravity_three(self, statement):
        lib = load_library(
            {
                "version": 1,
                "records": [
                    {
                        "code": "X",
                        "production": "Code",
                        "nature": "Semantic",
                        "gravity": 3,
                        "message": "m",
                    }
                ],
                "rules": [],
            }
        )
        earned, total_earned, _, _ = compute_grade([("X", "code")], statement, lib)
        assert earned["code"] == 7

    def test_floor_at_zero(self, statement):
        lib = load_library(
            {
                "version": 1,
                "records": [
                    {"code": "A", "production": "Code", "nature": "Semantic", "gravity": 6, "message": "m"},
                    {"code": "B", "production": "Code", "nature": "Semantic", "gravity": 7, "message": "m"},
                ],
                "rules": [],
            }
        )
        earned, _, _, _ = compute_grade([("A", "code"), ("B", "code")], statement, lib)
        assert earned["code"] == 0

    def test_repeated_code_counts_once(self, statement, library):
        once = compute_grade([Detection("E-OUTPUT", "code")], statement, library)
        twice = compute_grade(
            [Detection("E-OUTPUT", "code"), Detection("E-OUTPUT", "code")], statement, library
        )
        assert once == twice

    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_anti_monotonicity(self, statement, library, data):
        codes = sorted(library.records)
        pids = [p.id for p in statement.flow.productions]
        pool = [(c, p) for c in codes for p in pids]
        base = data.draw(st.lists(st.sampled_from(pool), max_size=6))
        extra = data.draw(st.sampled_from(pool))
        _, _, _, frac_base = compute_grade(base, statement, library)
        _, _, _, frac_more = compute_grade(base + [extra], statement, library)
        assert frac_more <= frac_base


def codes_by_production(report):
    return {
        p.production_id: [c.code for c in p.comments]
        for p in report.per_production
        if p.comments
    }


class TestCorrectSubmission:
    def test_golden_full_marks(self, corpus, statement, library):
        report = correct_submission(corpus["golden"], statement, library)
        assert codes_by_production(report) == {}
        assert report.grade_fraction == 1.0
        assert report.total_earned == 20

    def test_bounds_swap_exactly_one_comment(self, corpus, statement, library):
        report = correct_submission(corpus["bounds-constant-swap"], statement, library)
        assert codes_by_production(report) == {"gli": ["E-GLI-BOUNDS"]}
        assert report.grade_fraction == 0.95

    def test_payload_kind_mismatch(self, statement, library):
        payloads = fixtures.golden_payloads()
        payloads["gli"] = payloads["code"]  # source text on the drawing step
        sub = Submission("s001", statement.id, statement.window.opens_at, payloads)
        with pytest.raises(PayloadMismatch):
            correct_submission(sub, statement, library)

    def test_missing_payload(self, statement, library):
        payloads = fixtures.golden_payloads()
        del payloads["variant"]
        sub = Submission("s001", statement.id, statement.window.opens_at, payloads)
        with pytest.raises(PayloadMismatch):
            correct_submission(sub, statement, library)

    def test_guard_strict_cascade(self, corpus, statement, library):
        report = correct_submission(corpus["guard-strict"], statement, library)
        assert codes_by_production(report) == {
            "variant": ["E-VARIANT-INVALID"],
            "code": ["E-GUARD-REF", "E-OUTPUT", "E-GUARD-MISMATCH"],
        }
        assert report.grade_fraction == 0.5

    def test_undeclared_in_drawing(self, corpus, statement, library):
        # the stray cursor variable also corrupts the derived stop condition
        report = correct_submission(corpus["undeclared-in-drawing"], statement, library)
        assert codes_by_production(report) == {
            "final": ["E-STOP-COND"],
            "code": ["E-VAR-UNDECLARED", "E-GUARD-MISMATCH", "E-CONSISTENCY-UNCHECKABLE"],
        }
        by_id = {p.production_id: p for p in report.per_production}
        assert by_id["code"].points_earned == 7  # 10 - 1 - 2 - 0
        assert by_id["final"].points_earned == 1

    def test_does_not_compile(self, corpus, statement, library):
        report = correct_submission(corpus["does-not-compile"], statement, library)
        assert codes_by_production(report) == {
            "code": ["E-OUTPUT", "E-CONSISTENCY-UNCHECKABLE"]
        }
        assert report.grade_fraction == 0.8

    def test_duplicate_code_merges_to_one_comment(self, statement, library):
        # two unparseable boxes: one E-GLI-UNPARSED comment, deducted once
        # (filling box 3 at all additionally breaks its stay-blank rule)
        payloads = fixtures.golden_payloads()
        payloads["gli"] = fixtures.golden_gli(red={1: "p +", 3: "q +"})
        sub = Submission("s001", statement.id, statement.window.opens_at, payloads)
        report = correct_submission(sub, statement, library)
        assert codes_by_production(report) == {
            "gli": ["E-GLI-UNPARSED", "E-GLI-REMAINING-FILLED"]
        }
        gli = report.per_production[0]
        assert gli.points_earned == 2  # 4 - 1 - 1, the merged code once
        assert "box 1" in gli.comments[0].detail and "box 3" in gli.comments[0].detail

    def test_comment_carries_record_content(self, corpus, statement, library):
        report = correct_submission(corpus["wrong-accumulator"], statement, library)
        comment = report.per_production[0].comments[0]
        assert comment.code == "E-GLI-ACC-VAR"
        assert comment.nature == "Semantic"
        assert comment.feedforward == "Chapter 5, Section 2"
        assert comment.message == (
            "The processed region must name the accumulator holding the product so far."
        )

    def test_comment_without_feedforward(self, corpus, statement, library):
        report = correct_submission(corpus["sum-instead-of-product"], statement, library)
        by_id = {p.production_id: p for p in report.per_production}
        comment = by_id["code"].comments[0]
        assert comment.code == "E-OUTPUT"
        assert comment.feedforward is None
        assert '"feedforward"' not in report_to_json(report)

    def test_report_completeness(self, corpus, statement, library):
        # one comment per distinct (code, production) pair
        for sub in corpus.values():
            report = correct_submission(sub, statement, library)
            seen = set()
            for p in report.per_production:
                for c in p.comments:
                    key = (c.code, p.production_id)
                    assert key not in seen
                    seen.add(key)

    def test_pipeline_determinism(self, corpus, statement, library):
        for name in ("golden", "guard-strict", "does-not-compile"):
            first = report_to_json(correct_submission(corpus[name], statement, library))
            second = report_to_json(correct_submission(corpus[name], statement, library))
            assert first == second
