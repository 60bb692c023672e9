"""Checks over filled drawings: box-level syntax, concrete-state derivation
by bar manipulation, stop-condition construction, and variant functions
against execution traces.

Only the drawing's *form* is judged here.  Whether the invariant makes sense
is left to the rubric and the drawing/code consistency checks: replacing a
parseable red expression by any other parseable one with the same
constant-evaluability changes nothing below.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expressions import (
    BLANK,
    BinOp,
    EvalError,
    Expression,
    ExpressionSyntaxError,
    constant_value,
    eval_expression,
    normalize,
    parse_expression,
)
from .model import (
    BlankGliDescriptor,
    BoxColor,
    DescriptorMismatch,
    FilledGli,
    validate_filled_gli,
)


@dataclass(frozen=True)
class ConcreteState:
    """A drawing instantiated at one concrete point of the computation."""

    binding: dict[str, int]
    bar_values: dict[str, int]
    boxes_evaluated: dict[int, int | bool]


@dataclass(frozen=True)
class LoopTrace:
    """Variable snapshots around one loop: snapshot 0 is the state before the
    first guard test, the last snapshot is the state at loop exit."""

    snapshots: tuple[dict[str, int], ...]

    def __post_init__(self):
        if not self.snapshots:
            raise ValueError("a loop trace has at least one snapshot")
        keys = set(self.snapshots[0])
        for snap in self.snapshots[1:]:
            if set(snap) != keys:
                raise ValueError("all snapshots must bind the same variables")

    @property
    def iterations(self) -> int:
        return len(self.snapshots) - 1


def trace_to_doc(t: LoopTrace) -> list[dict[str, int]]:
    return [dict(sorted(s.items())) for s in t.snapshots]


def trace_from_doc(doc: list[dict[str, int]]) -> LoopTrace:
    return LoopTrace(tuple(dict(s) for s in doc))


def state_to_doc(s: ConcreteState) -> dict:
    return {
        "binding": dict(sorted(s.binding.items())),
        "bar-values": dict(sorted(s.bar_values.items())),
        "boxes-evaluated": {str(k): v for k, v in sorted(s.boxes_evaluated.items())},
    }


@dataclass(frozen=True)
class GliIssue:
    code: str
    detail: str = ""


GLI_RED_UNPARSED = "GLI_RED_UNPARSED"
GLI_RED_BLANK_REQUIRED = "GLI_RED_BLANK_REQUIRED"
GLI_GREEN_MISSING = "GLI_GREEN_MISSING"
GLI_BOUNDS_ORDER = "GLI_BOUNDS_ORDER"
GLI_ACHIEVED_MISSING = "GLI_ACHIEVED_MISSING"

ACHIEVED_ROLE = "achieved"
LOWER_BOUND_ROLE = "lower-bound"
UPPER_BOUND_ROLE = "upper-bound"


def validate_gli_syntax(g: FilledGli, d: BlankGliDescriptor) -> list[GliIssue]:
    """Form-level mistakes in a filled drawing.

    Reported codes: GLI_RED_UNPARSED, GLI_RED_BLANK_REQUIRED,
    GLI_GREEN_MISSING, GLI_BOUNDS_ORDER, GLI_ACHIEVED_MISSING.  The bound
    check only fires when two consecutive bar positions are both constant
    and out of order; symbolic positions are never flagged.  Raises
    DescriptorMismatch when the submission references undeclared boxes/bars.
    """
    validate_filled_gli(g, d)
    issues: list[GliIssue] = []

    for box in sorted(d.boxes, key=lambda b: b.number):
        if box.color is BoxColor.RED:
            text = g.red_assignments.get(box.number, "")
            blank = text.strip() == ""
            if blank:
                if box.role == ACHIEVED_ROLE:
                    issues.append(GliIssue(GLI_ACHIEVED_MISSING, f"box {box.number}"))
                elif box.required:
                    issues.append(GliIssue(GLI_RED_BLANK_REQUIRED, f"box {box.number}"))
                continue
            try:
                parse_expression(text)
            except ExpressionSyntaxError as err:
                issues.append(
                    GliIssue(GLI_RED_UNPARSED, f"box {box.number}: {err.reason}")
                )
        else:
            if box.number not in g.green_assignments:
                if box.role == ACHIEVED_ROLE:
                    issues.append(GliIssue(GLI_ACHIEVED_MISSING, f"box {box.number}"))
                else:
                    issues.append(GliIssue(GLI_GREEN_MISSING, f"box {box.number}"))

    issues.extend(check_box_bounds(d, g.red_assignments))
    issues.extend(check_bar_bounds(d, g.bar_positions))
    return issues


def check_box_bounds(d: BlankGliDescriptor, red: dict[int, str]) -> list[GliIssue]:
    """Constant, out-of-order bound boxes.  A lower-bound and an upper-bound
    box anchored to the same element form a pair."""
    issues: list[GliIssue] = []
    by_anchor: dict[str, dict[str, int]] = {}
    for box in d.boxes:
        if box.role in (LOWER_BOUND_ROLE, UPPER_BOUND_ROLE):
            by_anchor.setdefault(box.anchor, {})[box.role] = box.number
    for element in d.elements:
        pair = by_anchor.get(element.id, {})
        if LOWER_BOUND_ROLE in pair and UPPER_BOUND_ROLE in pair:
            lo_box, hi_box = pair[LOWER_BOUND_ROLE], pair[UPPER_BOUND_ROLE]
            lo_v = _constant_position(red.get(lo_box, ""))
            hi_v = _constant_position(red.get(hi_box, ""))
            if lo_v is not None and hi_v is not None and lo_v > hi_v:
                issues.append(
                    GliIssue(GLI_BOUNDS_ORDER, f"box {lo_box}={lo_v} > box {hi_box}={hi_v}")
                )
    return issues


def check_bar_bounds(d: BlankGliDescriptor, positions: dict[str, str]) -> list[GliIssue]:
    """Constant, out-of-order consecutive bar positions along a structure."""
    issues: list[GliIssue] = []
    by_structure: dict[str, list] = {}
    for bar in d.bars:
        by_structure.setdefault(bar.structure, []).append(bar)
    for bars in by_structure.values():
        bars.sort(key=lambda b: b.rank)
        for lower, upper in zip(bars, bars[1:]):
            lo_v = _constant_position(positions.get(lower.id, ""))
            hi_v = _constant_position(positions.get(upper.id, ""))
            if lo_v is not None and hi_v is not None and lo_v > hi_v:
                issues.append(
                    GliIssue(GLI_BOUNDS_ORDER, f"{lower.id}={lo_v} > {upper.id}={hi_v}")
                )
    return issues


def _constant_position(text: str):
    try:
        e = parse_expression(text)
    except ExpressionSyntaxError:
        return None
    if e is BLANK:
        return None
    v = constant_value(e)
    return v if isinstance(v, int) and not isinstance(v, bool) else None


class GliEvalError(Exception):
    """Evaluation failure inside a drawing, tagged with the box/bar it hit."""

    def __init__(self, location: str, cause: Exception):
        super().__init__(f"{location}: {cause}")
        self.location = location
        self.cause = cause
        self.code = getattr(cause, "code", "EVAL_ERROR")


def derive_state(g: FilledGli, binding: dict[str, int]) -> ConcreteState:
    """Evaluate every bar position and non-blank red box under `binding`.

    This is how the drawing is transposed into a concrete picture: the
    initial configuration, the final one, or any mid-loop state.
    """
    bar_values: dict[str, int] = {}
    for bar_id in sorted(g.bar_positions):
        bar_values[bar_id] = _eval_slot(g.bar_positions[bar_id], binding, f"bar {bar_id!r}")
    boxes: dict[int, int | bool] = {}
    for number in sorted(g.red_assignments):
        text = g.red_assignments[number]
        if text.strip() == "":
            continue
        boxes[number] = _eval_slot(text, binding, f"box {number}")
    return ConcreteState(binding=dict(binding), bar_values=bar_values, boxes_evaluated=boxes)


def _eval_slot(text: str, binding: dict[str, int], location: str):
    try:
        return eval_expression(parse_expression(text), binding)
    except (EvalError, ExpressionSyntaxError) as err:
        raise GliEvalError(location, err) from err


def derive_stop_condition(
    g: FilledGli, final_state_spec: dict[str, str], d: BlankGliDescriptor
) -> Expression:
    """Under which condition does the loop stop: the conjunction, per bar in
    the final-state spec, of (position expression = final position),
    normalized by constant folding and double-negation removal.

    The empty spec yields the constant true.
    """
    from .expressions import BoolLit  # local: tiny public surface

    conjuncts: list[Expression] = []
    ordered = [bar.id for bar in d.bars if bar.id in final_state_spec]
    unknown = set(final_state_spec) - {bar.id for bar in d.bars}
    if unknown:
        raise DescriptorMismatch(f"final state for unknown bars {sorted(unknown)}")
    for bar_id in ordered:
        if bar_id not in g.bar_positions:
            raise DescriptorMismatch(f"bar {bar_id!r} has no position in the drawing")
        current = parse_expression(g.bar_positions[bar_id])
        final = parse_expression(final_state_spec[bar_id])
        conjuncts.append(BinOp("=", current, final))
    if not conjuncts:
        return BoolLit(True)
    expr = conjuncts[0]
    for c in conjuncts[1:]:
        expr = BinOp("and", expr, c)
    return normalize(expr)


@dataclass(frozen=True)
class VariantIssue:
    code: str
    detail: str = ""


VARIANT_NOT_DECREASING = "VARIANT_NOT_DECREASING"
VARIANT_NEGATIVE = "VARIANT_NEGATIVE"
VARIANT_NONZERO_AT_EXIT = "VARIANT_NONZERO_AT_EXIT"
VARIANT_EVAL_ERROR = "VARIANT_EVAL_ERROR"


def check_variant(v: Expression, t: LoopTrace) -> list[VariantIssue]:
    """A valid variant counts the work left: integer at every snapshot,
    strictly decreasing, never negative before the end, exactly 0 at exit.

    Each violation kind is reported once, at its first occurrence; the
    iteration index names the later snapshot of an offending pair.
    """
    if v is BLANK:
        return [VariantIssue(VARIANT_EVAL_ERROR, "variant is blank")]
    values: list[int] = []
    for idx, snap in enumerate(t.snapshots):
        try:
            value = eval_expression(v, snap)
        except EvalError as err:
            return [VariantIssue(VARIANT_EVAL_ERROR, f"iteration {idx}: {err}")]
        if isinstance(value, bool):
            return [VariantIssue(VARIANT_EVAL_ERROR, f"iteration {idx}: boolean value")]
        values.append(value)

    issues: list[VariantIssue] = []
    for idx in range(1, len(values)):
        if values[idx] >= values[idx - 1]:
            issues.append(VariantIssue(VARIANT_NOT_DECREASING, str(idx)))
            break
    for idx in range(len(values) - 1):
        if values[idx] < 0:
            issues.append(VariantIssue(VARIANT_NEGATIVE, str(idx)))
            break
    if values[-1] != 0:
        issues.append(VariantIssue(VARIANT_NONZERO_AT_EXIT, str(values[-1])))
    return issues
