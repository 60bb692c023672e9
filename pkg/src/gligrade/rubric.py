"""The misconception library: the rubric of typical mistakes and the
declarative predicate instances that detect them.

This is the whole configuration surface a supervisor uses instead of writing
code: each record names a mistake (code, nature, gravity, feedback message,
optional course pointer) and rules tie records to one of a fixed set of
predicate kinds.  Checkers built from rules are pure functions of the
submission context, so a library loaded once can grade concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .expressions import ExpressionSyntaxError, normalize, parse_expression
from .gli import check_bar_bounds, check_box_bounds, check_variant
from .model import DescriptorMismatch, ProductionKind, RuleBinding


class Nature(str, Enum):
    SYNTACTIC = "Syntactic"
    SEMANTIC = "Semantic"


@dataclass(frozen=True)
class MisconceptionRecord:
    code: str
    production_kind: ProductionKind
    nature: Nature
    gravity: int | float
    message: str
    feedforward: str | None = None


@dataclass(frozen=True)
class Library:
    records: dict[str, MisconceptionRecord]
    rules: tuple[RuleBinding, ...]


class LibraryError(ValueError):
    def __init__(self, code: str, detail: str):
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail


LIB_DUPLICATE_CODE = "LIB_DUPLICATE_CODE"
LIB_BAD_GRAVITY = "LIB_BAD_GRAVITY"
LIB_INCOMPATIBLE_RULE = "LIB_INCOMPATIBLE_RULE"
LIB_UNKNOWN_CODE = "LIB_UNKNOWN_CODE"
LIB_BAD_VERSION = "LIB_BAD_VERSION"

# Which production kind each predicate may be attached to.
PREDICATE_COMPAT: dict[str, frozenset[ProductionKind]] = {
    "BoxEquals": frozenset({ProductionKind.GLI}),
    "BoxParses": frozenset({ProductionKind.GLI}),
    "BoxBlank": frozenset({ProductionKind.GLI}),
    "LabelIs": frozenset({ProductionKind.GLI}),
    "BoundsOrdered": frozenset(
        {
            ProductionKind.GLI,
            ProductionKind.INITIAL_REPRESENTATION,
            ProductionKind.FINAL_REPRESENTATION,
        }
    ),
    "GuardEquivalent": frozenset({ProductionKind.CODE}),
    "StopConditionMatches": frozenset(
        {ProductionKind.GLI, ProductionKind.FINAL_REPRESENTATION}
    ),
    "VarDeclared": frozenset({ProductionKind.CODE}),
    "VarInitializedTo": frozenset({ProductionKind.CODE}),
    "VariantValid": frozenset({ProductionKind.VARIANT_FUNCTION}),
    "OutputMatchesTests": frozenset({ProductionKind.CODE}),
    "TemplateRespected": frozenset({ProductionKind.CODE}),
}


def load_library(doc: dict) -> Library:
    """Validate and freeze a library configuration document."""
    if doc.get("version") != 1:
        raise LibraryError(LIB_BAD_VERSION, f"unsupported version {doc.get('version')!r}")
    records: dict[str, MisconceptionRecord] = {}
    for rec in doc.get("records", []):
        code = rec["code"]
        if code in records:
            raise LibraryError(LIB_DUPLICATE_CODE, code)
        gravity = rec["gravity"]
        if isinstance(gravity, bool) or not isinstance(gravity, (int, float)) or gravity < 0:
            raise LibraryError(LIB_BAD_GRAVITY, f"{code}: gravity {gravity!r}")
        records[code] = MisconceptionRecord(
            code=code,
            production_kind=ProductionKind(rec["production"]),
            nature=Nature(rec["nature"]),
            gravity=gravity,
            message=rec["message"],
            feedforward=rec.get("feedforward"),
        )
    rules = tuple(
        RuleBinding(r["code"], r["predicate"], dict(r.get("params", {})))
        for r in doc.get("rules", [])
    )
    validate_rules(rules, records)
    return Library(records=records, rules=rules)


def validate_rules(rules, records: dict[str, MisconceptionRecord]) -> None:
    """Shared by library loading and statement encoding: every rule must name
    a known record and a predicate compatible with the record's production."""
    for rule in rules:
        if rule.code not in records:
            raise LibraryError(LIB_UNKNOWN_CODE, rule.code)
        compat = PREDICATE_COMPAT.get(rule.predicate)
        if compat is None:
            raise LibraryError(
                LIB_INCOMPATIBLE_RULE, f"{rule.code}: unknown predicate {rule.predicate!r}"
            )
        if records[rule.code].production_kind not in compat:
            raise LibraryError(
                LIB_INCOMPATIBLE_RULE,
                f"{rule.code}: {rule.predicate} not applicable to "
                f"{records[rule.code].production_kind.value}",
            )


def serialize_library(lib: Library) -> dict:
    return {
        "version": 1,
        "records": [
            {
                "code": r.code,
                "production": r.production_kind.value,
                "nature": r.nature.value,
                "gravity": r.gravity,
                "message": r.message,
                **({"feedforward": r.feedforward} if r.feedforward is not None else {}),
            }
            for r in lib.records.values()
        ],
        "rules": [
            {"code": r.code, "predicate": r.predicate, "params": r.params}
            for r in lib.rules
        ],
    }


def lookup(lib: Library, code: str) -> MisconceptionRecord:
    if code not in lib.records:
        raise LibraryError(LIB_UNKNOWN_CODE, code)
    return lib.records[code]


# ---------------------------------------------------------------------------
# Checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckOutcome:
    status: str  # "ok" | "detected" | "uncheckable"
    detail: str | None = None


OK = CheckOutcome("ok")


def detected(detail: str | None = None) -> CheckOutcome:
    return CheckOutcome("detected", detail)


def uncheckable(detail: str) -> CheckOutcome:
    return CheckOutcome("uncheckable", detail)


Checker = Callable[[object], CheckOutcome]


def instantiate_checker(rule: RuleBinding, lib: Library) -> Checker:
    """Close a rule over its parameters; the result is a deterministic
    predicate over a submission context (see grading.SubmissionContext)."""
    record = lookup(lib, rule.code)
    factory = _FACTORIES.get(rule.predicate)
    if factory is None:
        raise LibraryError(LIB_INCOMPATIBLE_RULE, f"unknown predicate {rule.predicate!r}")
    return factory(rule.params, record)


def _box_equals(params, record):
    box = int(params["box"])
    expected = normalize(parse_expression(params["expected"]))

    def check(ctx) -> CheckOutcome:
        text = ctx.red_text(box)
        if text.strip() == "":
            return detected(f"box {box} left blank")
        try:
            e = parse_expression(text)
        except ExpressionSyntaxError:
            return OK  # unparseable content is BoxParses' business
        if normalize(e) != expected:
            return detected(f"box {box}")
        return OK

    return check


def _box_parses(params, record):
    box = int(params["box"])

    def check(ctx) -> CheckOutcome:
        try:
            parse_expression(ctx.red_text(box))
        except ExpressionSyntaxError as err:
            return detected(f"box {box}: {err.reason}")
        return OK

    return check


def _box_blank(params, record):
    box = int(params["box"])
    expect_blank = params.get("expect", "blank") == "blank"

    def check(ctx) -> CheckOutcome:
        blank = ctx.red_text(box).strip() == ""
        if blank != expect_blank:
            return detected(f"box {box}")
        return OK

    return check


def _label_is(params, record):
    box = int(params["box"])
    option = params["option"]

    def check(ctx) -> CheckOutcome:
        if ctx.green_choice(box) != option:
            return detected(f"box {box}")
        return OK

    return check


def _bounds_ordered(params, record):
    kind = record.production_kind

    def check(ctx) -> CheckOutcome:
        if kind is ProductionKind.GLI:
            # on the main drawing both bound boxes and bar chains apply
            if ctx.gli is None:
                return uncheckable("no drawing payload")
            issues = check_box_bounds(ctx.descriptor, ctx.gli.red_assignments)
            issues += check_bar_bounds(ctx.descriptor, ctx.gli.bar_positions)
        else:
            positions = (
                ctx.init_bars
                if kind is ProductionKind.INITIAL_REPRESENTATION
                else ctx.final_bars
            )
            if positions is None:
                return uncheckable("no bar positions payload")
            issues = check_bar_bounds(ctx.descriptor, positions)
        if issues:
            return detected("; ".join(i.detail for i in issues))
        return OK

    return check


def _guard_equivalent(params, record):
    reference = parse_expression(params["reference"])
    loop_id = int(params.get("loop", 1))

    def check(ctx) -> CheckOutcome:
        from .csubset import UnconvertibleGuard, guard_to_expression
        from .grading import guard_equivalent

        if ctx.program is None:
            return uncheckable("program does not parse")
        loop = ctx.loop(loop_id)
        if loop is None:
            return uncheckable(f"no loop {loop_id}")
        try:
            guard = guard_to_expression(loop.cond)
        except UnconvertibleGuard as err:
            return uncheckable(str(err))
        result = guard_equivalent(guard, reference)
        if not result.equivalent:
            return detected(f"differs at {result.witness}")
        return OK

    return check


def _stop_condition_matches(params, record):
    expected = parse_expression(params["expected"])

    def check(ctx) -> CheckOutcome:
        from .gli import derive_stop_condition
        from .grading import guard_equivalent

        if ctx.gli is None:
            return uncheckable("no drawing payload")
        if ctx.final_bars is None:
            return uncheckable("no final representation payload")
        try:
            stop = derive_stop_condition(ctx.gli, ctx.final_bars, ctx.descriptor)
        except (ExpressionSyntaxError, DescriptorMismatch) as err:
            return detected(f"stop condition cannot be derived: {err}")
        result = guard_equivalent(stop, expected)
        if not result.equivalent:
            return detected(f"differs at {result.witness}")
        return OK

    return check


def _var_declared(params, record):
    name = params["name"]

    def check(ctx) -> CheckOutcome:
        if ctx.program is None:
            return uncheckable("program does not parse")
        if name not in ctx.program.declarations:
            return detected(name)
        return OK

    return check


def _var_initialized_to(params, record):
    name = params["name"]
    expected = int(params["value"])

    def check(ctx) -> CheckOutcome:
        if ctx.program is None:
            return uncheckable("program does not parse")
        value = _initial_value(ctx.program, name)
        if value != expected:
            return detected(
                f"{name} starts at {value}" if value is not None else f"{name} is never initialized"
            )
        return OK

    return check


def _initial_value(program, name: str):
    """Constant first value assigned to `name` in straight-line code before
    the first loop; None when absent, conditional, or not constant."""
    from .csubset.nodes import Assign, Block, CVar, Decl, For, While

    def scan(stmts):
        for stmt in stmts:
            if isinstance(stmt, (While, For)):
                return "stop"
            if isinstance(stmt, Block):
                r = scan(stmt.stmts)
                if r != "continue":
                    return r
            elif isinstance(stmt, Decl) and stmt.name == name and stmt.init is not None:
                return _const_c_expr(stmt.init)
            elif isinstance(stmt, Assign) and isinstance(stmt.target, CVar) and stmt.target.name == name:
                return _const_c_expr(stmt.expr)
        return "continue"

    result = scan(program.body.stmts)
    return None if result in ("stop", "continue") else result


def _const_c_expr(e):
    from .csubset.nodes import CBin, CLit, CUnary

    if isinstance(e, CLit):
        return e.value
    if isinstance(e, CUnary) and e.op == "-":
        v = _const_c_expr(e.operand)
        return None if v is None else -v
    if isinstance(e, CBin) and e.op in ("+", "-", "*"):
        lv, rv = _const_c_expr(e.left), _const_c_expr(e.right)
        if lv is None or rv is None:
            return None
        return {"+": lv + rv, "-": lv - rv, "*": lv * rv}[e.op]
    return None


def _variant_valid(params, record):
    loop_id = int(params.get("loop", 1))

    def check(ctx) -> CheckOutcome:
        if ctx.variant_text is None:
            return uncheckable("no variant payload")
        try:
            v = parse_expression(ctx.variant_text)
        except ExpressionSyntaxError as err:
            return detected(f"variant does not parse: {err.reason}")
        trace = ctx.trace(loop_id)
        if trace is None:
            return uncheckable(f"no trace for loop {loop_id}")
        issues = check_variant(v, trace)
        if issues:
            return detected("; ".join(f"{i.code}({i.detail})" for i in issues))
        return OK

    return check


def _output_matches_tests(params, record):
    def check(ctx) -> CheckOutcome:
        if ctx.program is None:
            return detected(f"program does not compile: {ctx.parse_error}")
        failing = [
            f"case {idx + 1}: {r.status}"
            for idx, r in enumerate(ctx.test_results or [])
            if r.status != "pass"
        ]
        if failing:
            return detected("; ".join(failing))
        return OK

    return check


def _template_respected(params, record):
    def check(ctx) -> CheckOutcome:
        from .csubset import TemplateMalformed, check_template_respect

        if ctx.source is None:
            return uncheckable("no code payload")
        try:
            issues = check_template_respect(ctx.source, ctx.statement.code_template)
        except TemplateMalformed as err:
            return uncheckable(str(err))
        if issues:
            return detected("; ".join(f"line {i.line}" for i in issues))
        return OK

    return check


_FACTORIES = {
    "BoxEquals": _box_equals,
    "BoxParses": _box_parses,
    "BoxBlank": _box_blank,
    "LabelIs": _label_is,
    "BoundsOrdered": _bounds_ordered,
    "GuardEquivalent": _guard_equivalent,
    "StopConditionMatches": _stop_condition_matches,
    "VarDeclared": _var_declared,
    "VarInitializedTo": _var_initialized_to,
    "VariantValid": _variant_valid,
    "OutputMatchesTests": _output_matches_tests,
    "TemplateRespected": _template_respected,
}
