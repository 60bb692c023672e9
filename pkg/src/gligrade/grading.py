"""Grading pipeline: run every configured check over a submission, weigh
detected misconceptions by gravity, and assemble per-production feedback.

The pipeline is a pure function of (submission, statement, library): same
inputs give a byte-identical report.  Checker-internal evaluation errors
never escape; they become detections with the built-in E-EVAL code, and
checks whose inputs are unavailable (say, no trace because the program
crashed) surface as the informational E-CONSISTENCY-UNCHECKABLE.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .csubset import (
    CRuntimeError,
    CSyntaxError,
    StepBudgetExceeded,
    UnconvertibleGuard,
    UndeclaredVariable,
    guard_to_expression,
    parse_program,
    run_tests,
)
from .csubset.nodes import For, Program, While
from .expressions import (
    BinOp,
    EvalError,
    Expression,
    ExpressionSyntaxError,
    Not,
    eval_expression,
    free_vars,
    parse_expression,
)
from .gli import (
    GliEvalError,
    LoopTrace,
    check_variant,
    derive_stop_condition,
    validate_gli_syntax,
)
from .model import (
    BlankGliDescriptor,
    DescriptorMismatch,
    FilledGli,
    ProductionKind,
    Statement,
    Submission,
    canonical_json,
    validate_filled_gli,
)
from .rubric import (
    Library,
    MisconceptionRecord,
    Nature,
    instantiate_checker,
)

E_EVAL = "E-EVAL"
E_UNCHECKABLE = "E-CONSISTENCY-UNCHECKABLE"
E_VAR_UNDECLARED = "E-VAR-UNDECLARED"
E_INIT_MISMATCH = "E-INIT-MISMATCH"
E_GUARD_MISMATCH = "E-GUARD-MISMATCH"
E_VARIANT_PREFIX = "E-VARIANT-"

# Defaults for codes the pipeline can emit on its own; a library record with
# the same code takes precedence (that is how gravities are configured).
BUILTIN_RECORDS = {
    E_EVAL: MisconceptionRecord(
        code=E_EVAL,
        production_kind=ProductionKind.GENERIC,
        nature=Nature.SEMANTIC,
        gravity=0,
        message="A check could not evaluate this production's content.",
    ),
    E_UNCHECKABLE: MisconceptionRecord(
        code=E_UNCHECKABLE,
        production_kind=ProductionKind.GENERIC,
        nature=Nature.SEMANTIC,
        gravity=0,
        message="Some drawing/code consistency checks could not be run.",
    ),
}


class PayloadMismatch(Exception):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.code = "PAYLOAD_MISMATCH"
        self.detail = detail


def record_for(lib: Library, code: str) -> MisconceptionRecord:
    if code in lib.records:
        return lib.records[code]
    if code in BUILTIN_RECORDS:
        return BUILTIN_RECORDS[code]
    from .rubric import LIB_UNKNOWN_CODE, LibraryError

    raise LibraryError(LIB_UNKNOWN_CODE, code)


# ---------------------------------------------------------------------------
# Bounded-domain guard equivalence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    witness: dict[str, int] | None = None
    detail: str | None = None


def guard_equivalent(
    a: Expression,
    b: Expression,
    variables: list[str] | None = None,
    domain: range = range(-8, 9),
    constraint: Expression | None = None,
) -> EquivalenceResult:
    """Brute-force boolean equivalence over the Cartesian product of `domain`
    per variable.

    Returns the lexicographically smallest witness (variables in sorted
    order) when the expressions disagree.  An evaluation error at some point
    counts as disagreement at that point.  With `constraint`, points where
    the constraint is false or fails to evaluate are skipped: that is how
    reachable-state assumptions (bar ordering) enter the comparison.
    """
    if variables is None:
        names = free_vars(a) | free_vars(b)
        if constraint is not None:
            names |= free_vars(constraint)
        variables = sorted(names)
    for values in itertools.product(domain, repeat=len(variables)):
        binding = dict(zip(variables, values))
        if constraint is not None:
            try:
                if eval_expression(constraint, binding) is not True:
                    continue
            except EvalError:
                continue
        try:
            va = eval_expression(a, binding)
        except EvalError as err:
            return EquivalenceResult(False, binding, f"left: {err}")
        try:
            vb = eval_expression(b, binding)
        except EvalError as err:
            return EquivalenceResult(False, binding, f"right: {err}")
        if va is not True and va is not False:
            return EquivalenceResult(False, binding, "left is not boolean")
        if vb is not True and vb is not False:
            return EquivalenceResult(False, binding, "right is not boolean")
        if va != vb:
            return EquivalenceResult(False, binding)
    return EquivalenceResult(True)


def bar_chain_constraint(g: FilledGli, d: BlankGliDescriptor) -> Expression | None:
    """Reachable states of a drawing: along each structure, consecutive bar
    positions satisfy left <= right + 1 (a cursor may sit one past the region
    it has finished). Conjunction over all consecutive pairs."""
    conjuncts: list[Expression] = []
    by_structure: dict[str, list] = {}
    for bar in d.bars:
        by_structure.setdefault(bar.structure, []).append(bar)
    for bars in by_structure.values():
        bars.sort(key=lambda bar: bar.rank)
        for left, right in zip(bars, bars[1:]):
            try:
                le = parse_expression(g.bar_positions.get(left.id, ""))
                re_ = parse_expression(g.bar_positions.get(right.id, ""))
            except ExpressionSyntaxError:
                continue
            from .expressions import BLANK, Lit

            if le is BLANK or re_ is BLANK:
                continue
            conjuncts.append(BinOp("<=", le, BinOp("+", re_, Lit(1))))
    if not conjuncts:
        return None
    expr = conjuncts[0]
    for c in conjuncts[1:]:
        expr = BinOp("and", expr, c)
    return expr


# ---------------------------------------------------------------------------
# Submission context
# ---------------------------------------------------------------------------


@dataclass
class SubmissionContext:
    """Everything checkers may look at, computed once per submission."""

    statement: Statement
    submission: Submission
    gli: FilledGli | None = None
    descriptor: BlankGliDescriptor | None = None
    init_bars: dict[str, str] | None = None
    final_bars: dict[str, str] | None = None
    variant_text: str | None = None
    source: str | None = None
    program: Program | None = None
    parse_error: str | None = None
    test_results: list | None = None
    gli_issues: list = field(default_factory=list)

    def red_text(self, box: int) -> str:
        if self.gli is None:
            return ""
        return self.gli.red_assignments.get(box, "")

    def green_choice(self, box: int) -> str | None:
        if self.gli is None:
            return None
        return self.gli.green_assignments.get(box)

    def loop(self, loop_id: int):
        if self.program is None:
            return None
        found = []

        def walk(stmt):
            from .csubset.nodes import Block, If

            if isinstance(stmt, (While, For)):
                if stmt.loop_id == loop_id:
                    found.append(stmt)
                walk(stmt.body)
                if isinstance(stmt, For) and stmt.init is not None:
                    walk(stmt.init)
            elif isinstance(stmt, Block):
                for s in stmt.stmts:
                    walk(s)
            elif isinstance(stmt, If):
                walk(stmt.then)
                if stmt.orelse is not None:
                    walk(stmt.orelse)

        walk(self.program.body)
        return found[0] if found else None

    def trace(self, loop_id: int) -> LoopTrace | None:
        """Trace from the first test case's execution."""
        if not self.test_results:
            return None
        first = self.test_results[0]
        if first.execution is None:
            return None
        return first.execution.traces.get(loop_id)


def build_context(s: Submission, st: Statement, lib: Library) -> SubmissionContext:
    """Type-check payloads against the flow and precompute shared artifacts.

    Raises PayloadMismatch when a payload is missing, unexpected, or of the
    wrong shape for its production kind.
    """
    ctx = SubmissionContext(statement=st, submission=s, descriptor=st.gli)
    known = {p.id for p in st.flow.productions}
    unknown = set(s.payloads) - known
    if unknown:
        raise PayloadMismatch(f"payload for unknown production(s) {sorted(unknown)}")
    for production in st.flow.by_order():
        if production.id not in s.payloads:
            raise PayloadMismatch(f"missing payload for production {production.id!r}")
        payload = s.payloads[production.id]
        kind = production.kind
        if kind is ProductionKind.GLI:
            if not isinstance(payload, FilledGli):
                raise PayloadMismatch(f"production {production.id!r} expects a filled drawing")
            try:
                validate_filled_gli(payload, st.gli, st.label_options)
            except DescriptorMismatch as err:
                raise PayloadMismatch(str(err)) from err
            ctx.gli = payload
        elif kind in (ProductionKind.INITIAL_REPRESENTATION, ProductionKind.FINAL_REPRESENTATION):
            if not isinstance(payload, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in payload.items()
            ):
                raise PayloadMismatch(f"production {production.id!r} expects bar positions")
            bad = [bar for bar in payload if st.gli.bar(bar) is None]
            if bad:
                raise PayloadMismatch(f"unknown bar(s) {bad} in {production.id!r}")
            if kind is ProductionKind.INITIAL_REPRESENTATION:
                ctx.init_bars = payload
            else:
                ctx.final_bars = payload
        elif kind is ProductionKind.VARIANT_FUNCTION:
            if not isinstance(payload, str):
                raise PayloadMismatch(f"production {production.id!r} expects expression text")
            ctx.variant_text = payload
        elif kind is ProductionKind.CODE:
            if not isinstance(payload, str):
                raise PayloadMismatch(f"production {production.id!r} expects source text")
            ctx.source = payload

    if ctx.gli is not None:
        ctx.gli_issues = validate_gli_syntax(ctx.gli, st.gli)
    if ctx.source is not None:
        try:
            ctx.program = parse_program(ctx.source)
        except (CSyntaxError, UndeclaredVariable) as err:
            ctx.parse_error = str(err)
        if ctx.program is not None:
            ctx.test_results = run_tests(ctx.program, st.test_cases)
    return ctx


# ---------------------------------------------------------------------------
# Detections and consistency checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Detection:
    code: str
    production_id: str
    detail: str | None = None


def check_gli_code_consistency(
    g: FilledGli,
    init_bars: dict[str, str] | None,
    final_bars: dict[str, str] | None,
    variant: Expression | None,
    p: Program,
    first_trace: LoopTrace | None,
    d: BlankGliDescriptor,
) -> tuple[list[tuple[str, ProductionKind, str]], list[str]]:
    """Cross-production checks: does the code tell the drawing's story?

    Returns (detections as (code, production kind to attach to, detail),
    notes about sub-checks that could not run).
    """
    detections: list[tuple[str, ProductionKind, str]] = []
    skipped: list[str] = []

    # Every identifier the drawing mentions must exist in the program.
    drawing_vars: set[str] = set()
    for text in list(g.red_assignments.values()) + list(g.bar_positions.values()):
        try:
            drawing_vars |= free_vars(parse_expression(text))
        except ExpressionSyntaxError:
            continue
    missing = sorted(drawing_vars - set(p.declarations))
    if missing:
        detections.append((E_VAR_UNDECLARED, ProductionKind.CODE, ", ".join(missing)))

    # The initial picture must agree with the drawing instantiated at the
    # state the code actually reaches the loop with.
    if init_bars is not None:
        if first_trace is None:
            skipped.append("initial representation (no trace)")
        else:
            snap0 = first_trace.snapshots[0]
            mismatches = []
            for bar_id in sorted(init_bars):
                main_text = g.bar_positions.get(bar_id, "")
                try:
                    main_v = eval_expression(parse_expression(main_text), snap0)
                    init_v = eval_expression(parse_expression(init_bars[bar_id]), snap0)
                except (EvalError, ExpressionSyntaxError) as err:
                    skipped.append(f"initial representation bar {bar_id!r} ({err})")
                    continue
                if main_v != init_v:
                    mismatches.append(f"{bar_id}: drawing={main_v} initial={init_v}")
            if mismatches:
                detections.append(
                    (E_INIT_MISMATCH, ProductionKind.INITIAL_REPRESENTATION, "; ".join(mismatches))
                )

    # The loop guard must be the negation of the stop condition derived from
    # the final picture, on states the drawing can actually reach.
    if final_bars is not None:
        loop = _first_loop(p)
        if loop is None:
            skipped.append("guard (program has no loop)")
        else:
            try:
                stop = derive_stop_condition(g, final_bars, d)
                guard = guard_to_expression(loop.cond)
            except (ExpressionSyntaxError, DescriptorMismatch, UnconvertibleGuard) as err:
                skipped.append(f"guard ({err})")
            else:
                result = guard_equivalent(
                    guard, Not(stop), constraint=bar_chain_constraint(g, d)
                )
                if not result.equivalent:
                    detections.append(
                        (
                            E_GUARD_MISMATCH,
                            ProductionKind.CODE,
                            f"guard vs stop condition differ at {result.witness}",
                        )
                    )

    if variant is not None:
        if first_trace is None:
            skipped.append("variant (no trace)")
        else:
            for issue in check_variant(variant, first_trace):
                if issue.code == "VARIANT_EVAL_ERROR":
                    skipped.append(f"variant ({issue.detail})")
                else:
                    detections.append(
                        (
                            E_VARIANT_PREFIX + issue.code.removeprefix("VARIANT_").replace("_", "-"),
                            ProductionKind.VARIANT_FUNCTION,
                            issue.detail,
                        )
                    )
    return detections, skipped


def _first_loop(p: Program):
    def walk(stmt):
        from .csubset.nodes import Block, If

        if isinstance(stmt, (While, For)):
            return stmt
        if isinstance(stmt, Block):
            for s in stmt.stmts:
                r = walk(s)
                if r is not None:
                    return r
        if isinstance(stmt, If):
            r = walk(stmt.then)
            if r is None and stmt.orelse is not None:
                r = walk(stmt.orelse)
            return r
        return None

    return walk(p.body)


# ---------------------------------------------------------------------------
# Feedback report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeedbackComment:
    code: str
    nature: str
    message: str
    feedforward: str | None = None
    detail: str | None = None


@dataclass(frozen=True)
class ProductionFeedback:
    production_id: str
    comments: tuple[FeedbackComment, ...]
    points_earned: int | float
    points_possible: int | float


@dataclass(frozen=True)
class FeedbackReport:
    per_production: tuple[ProductionFeedback, ...]
    total_earned: int | float
    total_possible: int | float
    grade_fraction: float


def report_to_doc(report: FeedbackReport) -> dict:
    return {
        "per-production": [
            {
                "production-id": p.production_id,
                "comments": [
                    {
                        "code": c.code,
                        "nature": c.nature,
                        "message": c.message,
                        **({"feedforward": c.feedforward} if c.feedforward is not None else {}),
                        **({"detail": c.detail} if c.detail is not None else {}),
                    }
                    for c in p.comments
                ],
                "points-earned": p.points_earned,
                "points-possible": p.points_possible,
            }
            for p in report.per_production
        ],
        "total-earned": report.total_earned,
        "total-possible": report.total_possible,
        "grade-fraction": report.grade_fraction,
    }


def report_to_json(report: FeedbackReport) -> str:
    return canonical_json(report_to_doc(report))


def _dedupe(detections: list[Detection]) -> list[Detection]:
    """One detection per (code, production); extra details merge in order."""
    merged: dict[tuple[str, str], list[str]] = {}
    order: list[tuple[str, str]] = []
    for det in detections:
        key = (det.code, det.production_id)
        if key not in merged:
            merged[key] = []
            order.append(key)
        if det.detail:
            merged[key].append(det.detail)
    return [
        Detection(code, pid, "; ".join(details) if details else None)
        for (code, pid), details in ((k, merged[k]) for k in order)
    ]


def compute_grade(
    detections: list[tuple[str, str]] | list[Detection],
    st: Statement,
    lib: Library,
):
    """Per production: earned = max(0, weight - sum of gravities of the
    distinct detected codes). Returns (per-production dict, earned, possible,
    fraction)."""
    per_production: dict[str, set[str]] = {p.id: set() for p in st.flow.productions}
    for det in detections:
        code, pid = (det.code, det.production_id) if isinstance(det, Detection) else det
        record_for(lib, code)  # raises LIB_UNKNOWN_CODE
        if pid in per_production:
            per_production[pid].add(code)
    earned_by_production: dict[str, int | float] = {}
    for p in st.flow.productions:
        deduction = sum(record_for(lib, code).gravity for code in per_production[p.id])
        earned_by_production[p.id] = max(0, p.weight - deduction)
    total_possible = sum(p.weight for p in st.flow.productions)
    total_earned = sum(earned_by_production.values())
    if total_possible == 0:
        fraction = 1.0
    else:
        fraction = float(Fraction(total_earned) / Fraction(total_possible))
    return earned_by_production, total_earned, total_possible, fraction


def assemble_feedback(
    detections: list[Detection], st: Statement, lib: Library
) -> dict[str, list[FeedbackComment]]:
    """Comments grouped per production, in (production order, detection
    order); message and feedforward are copied verbatim from the records."""
    by_production: dict[str, list[FeedbackComment]] = {p.id: [] for p in st.flow.by_order()}
    for det in detections:
        record = record_for(lib, det.code)
        by_production[det.production_id].append(
            FeedbackComment(
                code=det.code,
                nature=record.nature.value,
                message=record.message,
                feedforward=record.feedforward,
                detail=det.detail,
            )
        )
    return by_production


def correct_submission(s: Submission, st: Statement, lib: Library) -> FeedbackReport:
    """Run the whole pipeline over one submission, in production order:
    drawing syntax feeds the rubric rules, code runs against the statement's
    test cases, then the drawing/code consistency checks close the loop."""
    ctx = build_context(s, st, lib)
    production_by_kind: dict[ProductionKind, str] = {}
    for p in st.flow.by_order():
        production_by_kind.setdefault(p.kind, p.id)

    detections: list[Detection] = []
    uncheckable_notes: list[str] = []

    for production in st.flow.by_order():
        for rule in st.rubric_bindings:
            record = record_for(lib, rule.code)
            if record.production_kind is not production.kind:
                continue
            checker = instantiate_checker(rule, lib)
            try:
                outcome = checker(ctx)
            except (EvalError, ExpressionSyntaxError, GliEvalError, DescriptorMismatch) as err:
                detections.append(Detection(E_EVAL, production.id, f"{rule.code}: {err}"))
                continue
            if outcome.status == "detected":
                detections.append(Detection(rule.code, production.id, outcome.detail))
            elif outcome.status == "uncheckable":
                uncheckable_notes.append(f"{rule.code}: {outcome.detail}")

    if ctx.gli is not None:
        if ctx.program is not None:
            variant_expr = None
            if ctx.variant_text is not None:
                try:
                    variant_expr = parse_expression(ctx.variant_text)
                except ExpressionSyntaxError:
                    variant_expr = None  # the VariantValid rule reports this
            consistency, skipped = check_gli_code_consistency(
                ctx.gli,
                ctx.init_bars,
                ctx.final_bars,
                variant_expr,
                ctx.program,
                ctx.trace(1),
                st.gli,
            )
            uncheckable_notes.extend(skipped)
            for code, kind, detail in consistency:
                if code not in lib.records:
                    continue  # consistency checks run as configured
                pid = production_by_kind.get(kind)
                if pid is not None:
                    detections.append(Detection(code, pid, detail))
        else:
            uncheckable_notes.append(f"consistency (program does not parse: {ctx.parse_error})")

    if uncheckable_notes:
        pid = production_by_kind.get(ProductionKind.CODE) or st.flow.by_order()[-1].id
        detections.append(Detection(E_UNCHECKABLE, pid, "; ".join(uncheckable_notes)))

    detections = _dedupe(detections)
    earned, total_earned, total_possible, fraction = compute_grade(detections, st, lib)
    comments = assemble_feedback(detections, st, lib)
    per_production = tuple(
        ProductionFeedback(
            production_id=p.id,
            comments=tuple(comments[p.id]),
            points_earned=earned[p.id],
            points_possible=p.weight,
        )
        for p in st.flow.by_order()
    )
    return FeedbackReport(
        per_production=per_production,
        total_earned=total_earned,
        total_possible=total_possible,
        grade_fraction=fraction,
    )
