"""Expression language: parsing, evaluation, printing round-trip."""

import pytest
from hypothesis import given, strategies as st

from gligrade.expressions import (
    BLANK,
    BinOp,
    BoolLit,
    EvalError,
    ExpressionSyntaxError,
    Lit,
    Not,
    Var,
    eval_expression,
    free_vars,
    normalize,
    parse_expression,
    pretty,
)


def ev(text, env=None):
    return eval_expression(parse_expression(text), env or {})


class TestParse:
    def test_left_associative_chain(self):
        # "hi - i + 1" groups as (hi - i) + 1
        assert parse_expression("hi - i + 1") == BinOp(
            "+", BinOp("-", Var("hi"), Var("i")), Lit(1)
        )

    def test_blank(self):
        assert parse_expression("") is BLANK
        assert parse_expression("   \t ") is BLANK

    def test_unknown_operator_offset(self):
        with pytest.raises(ExpressionSyntaxError) as exc:
            parse_expression("2 ** 3")
        assert exc.value.offset == 2
        assert exc.value.code == "SYNTAX_ERROR"

    def test_precedence(self):
        assert parse_expression("1 + 2 * 3") == BinOp(
            "+", Lit(1), BinOp("*", Lit(2), Lit(3))
        )
        assert parse_expression("(1 + 2) * 3") == BinOp(
            "*", BinOp("+", Lit(1), Lit(2)), Lit(3)
        )
        # not binds tighter than arithmetic, comparisons tighter than and/or
        assert parse_expression("a < b and c < d") == BinOp(
            "and", BinOp("<", Var("a"), Var("b")), BinOp("<", Var("c"), Var("d"))
        )

    def test_c_spellings_normalize(self):
        assert parse_expression("i <= hi && !(p == 0)") == parse_expression(
            "i <= hi and not (p = 0)"
        )
        assert parse_expression("a || b") == BinOp("or", Var("a"), Var("b"))
        assert parse_expression("7 mod 2") == parse_expression("7 % 2")

    def test_negative_literal(self):
        assert parse_expression("-8") == Lit(-8)
        assert parse_expression("hi - -3") == BinOp("-", Var("hi"), Lit(-3))

    def test_booleans(self):
        assert parse_expression("true") == BoolLit(True)

    @pytest.mark.parametrize("bad", ["1 +", "* 2", "(a", "a b", "1 @ 2", "not"])
    def test_malformed(self, bad):
        with pytest.raises(ExpressionSyntaxError):
            parse_expression(bad)


class TestEval:
    def test_literal(self):
        assert ev("5") == 5

    def test_arithmetic_oracle(self):
        # hand value: 7 - 3 + 1
        assert ev("hi - i + 1", {"hi": 7, "i": 3}) == 5

    def test_unbound(self):
        with pytest.raises(EvalError) as exc:
            ev("x < 3")
        assert exc.value.code == "UNBOUND_VARIABLE"
        assert exc.value.detail == "x"

    def test_division_truncates_toward_zero(self):
        assert ev("-7 / 2") == -3
        assert ev("7 / 2") == 3
        assert ev("-7 % 2") == -1
        assert ev("7 % -2") == 1

    def test_div_by_zero(self):
        for text in ["1 / 0", "1 % 0"]:
            with pytest.raises(EvalError) as exc:
                ev(text)
            assert exc.value.code == "DIV_BY_ZERO"

    def test_overflow(self):
        big = str(2**62)
        with pytest.raises(EvalError) as exc:
            ev(f"{big} + {big}")
        assert exc.value.code == "OVERFLOW"

    def test_type_mismatch(self):
        with pytest.raises(EvalError) as exc:
            ev("(1 < 2) + 3")
        assert exc.value.code == "TYPE_MISMATCH"
        with pytest.raises(EvalError):
            ev("1 and 2")
        with pytest.raises(EvalError):
            ev("not 3")
        with pytest.raises(EvalError):
            ev("(1 < 2) < 3")

    def test_blank_eval(self):
        with pytest.raises(EvalError) as exc:
            eval_expression(BLANK, {})
        assert exc.value.code == "BLANK_EVAL"

    def test_short_circuit(self):
        assert ev("x = 0 or 10 / x > 1", {"x": 0}) is True
        assert ev("x != 0 and 10 / x > 1", {"x": 0}) is False

    def test_comparison_results(self):
        assert ev("2 <= 2") is True
        assert ev("2 != 2") is False
        assert ev("3 = 3") is True


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------

_names = st.sampled_from(["i", "hi", "lo", "p", "n", "x"])


def _exprs():
    leaves = st.one_of(
        st.integers(min_value=-50, max_value=50).map(Lit),
        _names.map(Var),
        st.booleans().map(BoolLit),
    )

    def extend(children):
        arith = st.tuples(
            st.sampled_from(["+", "-", "*", "/", "%"]), children, children
        ).map(lambda t: BinOp(*t))
        cmp_ = st.tuples(
            st.sampled_from(["<", "<=", ">", ">=", "=", "!="]), children, children
        ).map(lambda t: BinOp(*t))
        logic = st.tuples(st.sampled_from(["and", "or"]), children, children).map(
            lambda t: BinOp(*t)
        )
        return st.one_of(arith, cmp_, logic, children.map(Not))

    return st.recursive(leaves, extend, max_leaves=20)


@given(_exprs())
def test_pretty_parse_round_trip(e):
    assert parse_expression(pretty(e)) == e


@given(_exprs())
def test_normalize_preserves_meaning(e):
    env = {n: 3 for n in ("i", "hi", "lo", "p", "n", "x")}
    try:
        before = eval_expression(e, env)
    except EvalError as err:
        # folding keeps erroring subtrees, so the same error class remains
        with pytest.raises(EvalError) as exc:
            eval_expression(normalize(e), env)
        assert exc.value.code == err.code
        return
    assert eval_expression(normalize(e), env) == before


@given(_exprs())
def test_eval_total(e):
    # every input terminates with a value or a listed error
    try:
        v = eval_expression(e, {"i": 1, "hi": 2})
        assert isinstance(v, (int, bool))
    except EvalError as err:
        assert err.code in {
            "UNBOUND_VARIABLE",
            "DIV_BY_ZERO",
            "TYPE_MISMATCH",
            "BLANK_EVAL",
            "OVERFLOW",
        }


def test_double_negation_removed():
    cmp_ = BinOp("<", Var("a"), Var("b"))
    assert normalize(Not(Not(cmp_))) == cmp_
    # over an integer operand the ill-typed original is preserved
    assert normalize(Not(Not(Var("a")))) == Not(Not(Var("a")))


def test_constant_folding():
    assert normalize(parse_expression("2 + 3 * 4")) == Lit(14)
    assert normalize(parse_expression("1 < 2")) == BoolLit(True)
    # open subtrees stay; erroring constants stay as written
    assert normalize(parse_expression("x + (1 / 0)")) == BinOp(
        "+", Var("x"), BinOp("/", Lit(1), Lit(0))
    )


def test_free_vars():
    assert free_vars(parse_expression("hi - i + 1")) == {"hi", "i"}
    assert free_vars(Lit(3)) == set()
