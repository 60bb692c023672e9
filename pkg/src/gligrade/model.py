"""Shared domain types: resolution flows, drawing descriptors, statements,
submissions, and their canonical JSON encodings.

The JSON forms defined here are the wire and storage format for every other
module.  Box maps are keyed by the decimal box number as a string; all
instants are UTC; expression content travels as source text (so syntactically
broken student input survives a round trip and can be reported on).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction


class ProductionKind(str, Enum):
    GLI = "Gli"
    INITIAL_REPRESENTATION = "InitialRepresentation"
    FINAL_REPRESENTATION = "FinalRepresentation"
    VARIANT_FUNCTION = "VariantFunction"
    CODE = "Code"
    GENERIC = "Generic"


class Phase(str, Enum):
    ABSTRACTION = "Abstraction"
    CONCRETE = "Concrete"
    BRIDGE = "Bridge"


class BoxColor(str, Enum):
    RED = "Red"
    GREEN = "Green"


@dataclass(frozen=True)
class Production:
    id: str
    kind: ProductionKind
    phase: Phase
    order: int
    weight: int


@dataclass(frozen=True)
class ResolutionFlow:
    productions: tuple[Production, ...]
    # (blocked production id, prerequisite production id)
    locks: tuple[tuple[str, str], ...] = ()

    def by_order(self) -> list[Production]:
        return sorted(self.productions, key=lambda p: p.order)

    def get(self, production_id: str) -> Production | None:
        for p in self.productions:
            if p.id == production_id:
                return p
        return None


@dataclass(frozen=True)
class GliElement:
    """One fixed graphical element of a blank drawing (a value range, a
    region of it, a free-floating note area...). Geometry is not modeled;
    the authored layout is trusted."""

    id: str
    kind: str
    label: str = ""


@dataclass(frozen=True)
class Box:
    number: int
    color: BoxColor
    anchor: str  # element id the box is attached to
    required: bool = False  # red boxes only: must not be left blank
    role: str | None = None  # e.g. "achieved" for the what-was-done label


@dataclass(frozen=True)
class Bar:
    """A movable vertical bar. `rank` orders bars left-to-right along their
    structure; consecutive ranks form the pairs checked for bound order."""

    id: str
    structure: str  # element id of the range the bar lives on
    rank: int


@dataclass(frozen=True)
class BlankGliDescriptor:
    id: str
    elements: tuple[GliElement, ...]
    boxes: tuple[Box, ...]
    bars: tuple[Bar, ...]

    def box(self, number: int) -> Box | None:
        for b in self.boxes:
            if b.number == number:
                return b
        return None

    def bar(self, bar_id: str) -> Bar | None:
        for b in self.bars:
            if b.id == bar_id:
                return b
        return None


@dataclass(frozen=True)
class LabelOption:
    id: str
    text: str
    distractor: bool = False


@dataclass(frozen=True)
class FilledGli:
    """A student's instantiation of a blank drawing.

    Red content and bar positions are held as expression source text: broken
    input must survive so the syntax checker can point at it.  Blank is the
    empty string.
    """

    descriptor_ref: str
    red_assignments: dict[int, str] = field(default_factory=dict)
    green_assignments: dict[int, str] = field(default_factory=dict)
    bar_positions: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # keep pytest from collecting the domain type

    stdin: str
    expected_stdout: str


@dataclass(frozen=True)
class RuleBinding:
    """One configured rubric check: ties a misconception code to a predicate
    instance. Mirrors the misconception library's rule shape."""

    code: str
    predicate: str
    params: dict


@dataclass(frozen=True)
class Window:
    opens_at: datetime
    closes_at: datetime


@dataclass(frozen=True)
class Statement:
    id: str
    title: str
    prose: str
    flow: ResolutionFlow
    gli: BlankGliDescriptor
    label_options: tuple[LabelOption, ...]
    code_template: str
    test_cases: tuple[TestCase, ...]
    rubric_bindings: tuple[RuleBinding, ...]
    window: Window
    weight_percent: Fraction
    formative_only: bool


@dataclass(frozen=True)
class Submission:
    student_id: str
    statement_id: str
    at: datetime
    # production id -> payload: FilledGli | dict[bar,text] | str
    payloads: dict
    seq: int = 1


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str = ""


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


FLOW_EMPTY = "FLOW_EMPTY"
FLOW_ORDER_NOT_CONTIGUOUS = "FLOW_ORDER_NOT_CONTIGUOUS"
FLOW_DUPLICATE_ID = "FLOW_DUPLICATE_ID"
FLOW_PHASE_ORDER = "FLOW_PHASE_ORDER"
FLOW_KIND_PHASE = "FLOW_KIND_PHASE"
FLOW_LOCK_UNKNOWN = "FLOW_LOCK_UNKNOWN"
FLOW_LOCK_ORDER = "FLOW_LOCK_ORDER"


def validate_resolution_flow(flow: ResolutionFlow) -> ValidationResult:
    """Check every flow invariant; violations are values, never exceptions.

    A flow is valid when it has 1..N contiguous orders, unique production
    ids, no abstraction step after a concrete one (bridge steps may sit
    anywhere), kind/phase compatibility, and locks that only point backwards.
    """
    out: list[Violation] = []
    if not flow.productions:
        return ValidationResult((Violation(FLOW_EMPTY),))

    orders = sorted(p.order for p in flow.productions)
    if orders != list(range(1, len(flow.productions) + 1)):
        out.append(Violation(FLOW_ORDER_NOT_CONTIGUOUS, f"orders={orders}"))

    seen: set[str] = set()
    for p in flow.productions:
        if p.id in seen:
            out.append(Violation(FLOW_DUPLICATE_ID, p.id))
        seen.add(p.id)
        if p.kind is ProductionKind.CODE and p.phase is not Phase.CONCRETE:
            out.append(Violation(FLOW_KIND_PHASE, f"{p.id}: Code must be Concrete"))
        if p.kind is ProductionKind.GLI and p.phase is not Phase.ABSTRACTION:
            out.append(Violation(FLOW_KIND_PHASE, f"{p.id}: Gli must be Abstraction"))

    concrete_seen_at = None
    for p in flow.by_order():
        if p.phase is Phase.CONCRETE and concrete_seen_at is None:
            concrete_seen_at = p.order
        if p.phase is Phase.ABSTRACTION and concrete_seen_at is not None:
            out.append(
                Violation(FLOW_PHASE_ORDER, f"{p.id} (order {p.order}) after concrete")
            )

    by_id = {p.id: p for p in flow.productions}
    for blocked, prereq in flow.locks:
        if blocked not in by_id or prereq not in by_id:
            out.append(Violation(FLOW_LOCK_UNKNOWN, f"{blocked}<-{prereq}"))
        elif by_id[prereq].order >= by_id[blocked].order:
            out.append(Violation(FLOW_LOCK_ORDER, f"{blocked}<-{prereq}"))

    return ValidationResult(tuple(out))


GLI_DESC_BOX_NUMBERS = "GLI_DESC_BOX_NUMBERS"
GLI_DESC_NO_BARS = "GLI_DESC_NO_BARS"
GLI_DESC_ANCHOR = "GLI_DESC_ANCHOR"
GLI_DESC_BAR_STRUCTURE = "GLI_DESC_BAR_STRUCTURE"
GLI_DESC_DUPLICATE = "GLI_DESC_DUPLICATE"


def validate_descriptor(d: BlankGliDescriptor) -> ValidationResult:
    """Blank drawing invariants: contiguous box numbering from 1, at least
    one movable bar, and anchors/structures that exist."""
    out: list[Violation] = []
    numbers = sorted(b.number for b in d.boxes)
    if numbers != list(range(1, len(d.boxes) + 1)):
        out.append(Violation(GLI_DESC_BOX_NUMBERS, f"numbers={numbers}"))
    if not d.bars:
        out.append(Violation(GLI_DESC_NO_BARS))
    element_ids = [e.id for e in d.elements]
    if len(set(element_ids)) != len(element_ids):
        out.append(Violation(GLI_DESC_DUPLICATE, "element ids"))
    bar_ids = [b.id for b in d.bars]
    if len(set(bar_ids)) != len(bar_ids):
        out.append(Violation(GLI_DESC_DUPLICATE, "bar ids"))
    known = set(element_ids)
    for box in d.boxes:
        if box.color is BoxColor.GREEN and box.anchor not in known:
            out.append(Violation(GLI_DESC_ANCHOR, f"box {box.number} -> {box.anchor}"))
    for bar in d.bars:
        if bar.structure not in known:
            out.append(Violation(GLI_DESC_BAR_STRUCTURE, f"bar {bar.id}"))
    ranks: dict[str, set[int]] = {}
    for bar in d.bars:
        if bar.rank in ranks.setdefault(bar.structure, set()):
            out.append(Violation(GLI_DESC_DUPLICATE, f"bar rank {bar.rank} on {bar.structure}"))
        ranks[bar.structure].add(bar.rank)
    return ValidationResult(tuple(out))


STATEMENT_WINDOW = "STATEMENT_WINDOW"
STATEMENT_WEIGHT_FORMATIVE = "STATEMENT_WEIGHT_FORMATIVE"
STATEMENT_OPTION_DUPLICATE = "STATEMENT_OPTION_DUPLICATE"


def validate_statement(st: Statement) -> ValidationResult:
    """Statement-level invariants plus the nested flow/descriptor ones."""
    out = list(validate_resolution_flow(st.flow).violations)
    out += list(validate_descriptor(st.gli).violations)
    if st.window.opens_at >= st.window.closes_at:
        out.append(Violation(STATEMENT_WINDOW, "opens-at must precede closes-at"))
    if (st.weight_percent == 0) != st.formative_only:
        out.append(Violation(STATEMENT_WEIGHT_FORMATIVE))
    ids = [o.id for o in st.label_options]
    if len(set(ids)) != len(ids):
        out.append(Violation(STATEMENT_OPTION_DUPLICATE))
    return ValidationResult(tuple(out))


class DescriptorMismatch(Exception):
    """A filled drawing references boxes/bars/options its descriptor does
    not declare (or with the wrong color)."""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.code = "DESCRIPTOR_MISMATCH"
        self.detail = detail


def validate_filled_gli(
    g: FilledGli, d: BlankGliDescriptor, options: tuple[LabelOption, ...] = ()
) -> None:
    if g.descriptor_ref != d.id:
        raise DescriptorMismatch(f"descriptor {g.descriptor_ref!r} is not {d.id!r}")
    for number in g.red_assignments:
        box = d.box(number)
        if box is None or box.color is not BoxColor.RED:
            raise DescriptorMismatch(f"no red box {number}")
    for number in g.green_assignments:
        box = d.box(number)
        if box is None or box.color is not BoxColor.GREEN:
            raise DescriptorMismatch(f"no green box {number}")
    for bar_id in g.bar_positions:
        if d.bar(bar_id) is None:
            raise DescriptorMismatch(f"no bar {bar_id!r}")
    if options:
        known = {o.id for o in options}
        for number, option_id in g.green_assignments.items():
            if option_id not in known:
                raise DescriptorMismatch(f"box {number}: unknown option {option_id!r}")


# ---------------------------------------------------------------------------
# Instants and rationals
# ---------------------------------------------------------------------------


def parse_instant(text: str) -> datetime:
    """ISO-8601 with zone, normalized to UTC. 'Z' suffix accepted."""
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        raise ValueError(f"instant {text!r} lacks a timezone")
    return dt.astimezone(timezone.utc)


def format_instant(dt: datetime) -> str:
    dt = dt.astimezone(timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_rational(value) -> Fraction:
    """Accepts JSON int, decimal float, or an 'a/b' string."""
    if isinstance(value, bool):
        raise ValueError("not a number")
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(str(value))


def format_rational(value: Fraction):
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# Canonical JSON
# ---------------------------------------------------------------------------


def canonical_json(doc) -> str:
    """The one serialized form used for wire, storage and byte-compare."""
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


def filled_gli_to_doc(g: FilledGli) -> dict:
    return {
        "descriptor-ref": g.descriptor_ref,
        "red-assignments": {str(k): v for k, v in sorted(g.red_assignments.items())},
        "green-assignments": {str(k): v for k, v in sorted(g.green_assignments.items())},
        "bar-positions": {k: g.bar_positions[k] for k in sorted(g.bar_positions)},
    }


def filled_gli_from_doc(doc: dict) -> FilledGli:
    if not isinstance(doc, dict):
        raise ValueError("a filled drawing payload must be a JSON object")
    return FilledGli(
        descriptor_ref=doc["descriptor-ref"],
        red_assignments={int(k): v for k, v in doc.get("red-assignments", {}).items()},
        green_assignments={int(k): v for k, v in doc.get("green-assignments", {}).items()},
        bar_positions=dict(doc.get("bar-positions", {})),
    )


def statement_to_doc(st: Statement) -> dict:
    return {
        "id": st.id,
        "title": st.title,
        "prose": st.prose,
        "flow": {
            "productions": [
                {
                    "id": p.id,
                    "kind": p.kind.value,
                    "phase": p.phase.value,
                    "order": p.order,
                    "weight": p.weight,
                }
                for p in st.flow.productions
            ],
            "locks": [list(lock) for lock in st.flow.locks],
        },
        "gli": {
            "id": st.gli.id,
            "elements": [
                {"id": e.id, "kind": e.kind, "label": e.label} for e in st.gli.elements
            ],
            "boxes": [
                {
                    "number": b.number,
                    "color": b.color.value,
                    "anchor": b.anchor,
                    "required": b.required,
                    "role": b.role,
                }
                for b in st.gli.boxes
            ],
            "bars": [
                {"id": b.id, "structure": b.structure, "rank": b.rank}
                for b in st.gli.bars
            ],
        },
        "label-options": [
            {"id": o.id, "text": o.text, "distractor": o.distractor}
            for o in st.label_options
        ],
        "code-template": st.code_template,
        "test-cases": [
            {"stdin": c.stdin, "expected-stdout": c.expected_stdout}
            for c in st.test_cases
        ],
        "rubric-bindings": [
            {"code": r.code, "predicate": r.predicate, "params": r.params}
            for r in st.rubric_bindings
        ],
        "window": {
            "opens-at": format_instant(st.window.opens_at),
            "closes-at": format_instant(st.window.closes_at),
        },
        "weight-percent": format_rational(st.weight_percent),
        "formative-only": st.formative_only,
    }


def statement_from_doc(doc: dict) -> Statement:
    flow = ResolutionFlow(
        productions=tuple(
            Production(
                id=p["id"],
                kind=ProductionKind(p["kind"]),
                phase=Phase(p["phase"]),
                order=p["order"],
                weight=p["weight"],
            )
            for p in doc["flow"]["productions"]
        ),
        locks=tuple((lk[0], lk[1]) for lk in doc["flow"].get("locks", [])),
    )
    gli_doc = doc["gli"]
    gli = BlankGliDescriptor(
        id=gli_doc["id"],
        elements=tuple(
            GliElement(e["id"], e["kind"], e.get("label", ""))
            for e in gli_doc.get("elements", [])
        ),
        boxes=tuple(
            Box(
                number=b["number"],
                color=BoxColor(b["color"]),
                anchor=b["anchor"],
                required=b.get("required", False),
                role=b.get("role"),
            )
            for b in gli_doc.get("boxes", [])
        ),
        bars=tuple(
            Bar(b["id"], b["structure"], b["rank"]) for b in gli_doc.get("bars", [])
        ),
    )
    return Statement(
        id=doc["id"],
        title=doc["title"],
        prose=doc.get("prose", ""),
        flow=flow,
        gli=gli,
        label_options=tuple(
            LabelOption(o["id"], o["text"], o.get("distractor", False))
            for o in doc.get("label-options", [])
        ),
        code_template=doc.get("code-template", ""),
        test_cases=tuple(
            TestCase(c["stdin"], c["expected-stdout"]) for c in doc.get("test-cases", [])
        ),
        rubric_bindings=tuple(
            RuleBinding(r["code"], r["predicate"], dict(r.get("params", {})))
            for r in doc.get("rubric-bindings", [])
        ),
        window=Window(
            opens_at=parse_instant(doc["window"]["opens-at"]),
            closes_at=parse_instant(doc["window"]["closes-at"]),
        ),
        weight_percent=parse_rational(doc["weight-percent"]),
        formative_only=doc.get("formative-only", False),
    )


def _payload_to_doc(payload):
    if isinstance(payload, FilledGli):
        return filled_gli_to_doc(payload)
    if isinstance(payload, dict):  # bar positions
        return {k: payload[k] for k in sorted(payload)}
    return payload  # expression text or source text


def _payload_from_doc(doc, kind: ProductionKind):
    if kind is ProductionKind.GLI:
        return filled_gli_from_doc(doc)
    if kind in (ProductionKind.INITIAL_REPRESENTATION, ProductionKind.FINAL_REPRESENTATION):
        return dict(doc)
    return doc


def submission_to_doc(s: Submission) -> dict:
    return {
        "student-id": s.student_id,
        "statement-id": s.statement_id,
        "at": format_instant(s.at),
        "seq": s.seq,
        "payloads": {pid: _payload_to_doc(p) for pid, p in sorted(s.payloads.items())},
    }


def submission_from_doc(doc: dict, flow: ResolutionFlow | None = None) -> Submission:
    """Decode a submission. When `flow` is given, payloads are typed by the
    kind of the production they answer; otherwise raw docs are kept."""
    payloads = {}
    for pid, pdoc in doc.get("payloads", {}).items():
        if flow is not None and flow.get(pid) is not None:
            payloads[pid] = _payload_from_doc(pdoc, flow.get(pid).kind)
        else:
            payloads[pid] = pdoc
    return Submission(
        student_id=doc["student-id"],
        statement_id=doc["statement-id"],
        at=parse_instant(doc["at"]),
        payloads=payloads,
        seq=doc.get("seq", 1),
    )
