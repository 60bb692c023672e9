"""Shipped demonstration content: the product-of-a-range challenge, its
misconception rubric, a corpus of crafted submissions (one golden, one per
injected fault), and a synthetic activity log shaped like one semester.

Everything here is deterministic data, used by the seed command, the test
suite, and offline grading demos.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from fractions import Fraction

from .model import (
    Bar,
    BlankGliDescriptor,
    Box,
    BoxColor,
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
)

# --- the drawing -----------------------------------------------------------

DESCRIPTOR_ID = "product-range-gli"


def product_descriptor() -> BlankGliDescriptor:
    """A range of values split by a cursor: the part whose product is already
    in hand, and the part still to multiply."""
    return BlankGliDescriptor(
        id=DESCRIPTOR_ID,
        elements=(
            GliElement("range", "range", "the integers given as input"),
            GliElement("processed", "region", "already multiplied"),
            GliElement("remaining", "region", "still to multiply"),
        ),
        boxes=(
            Box(1, BoxColor.RED, "processed", required=True),
            Box(2, BoxColor.GREEN, "processed", role="achieved"),
            Box(3, BoxColor.RED, "remaining"),
            Box(4, BoxColor.GREEN, "remaining"),
            Box(5, BoxColor.RED, "range", required=True, role="lower-bound"),
            Box(6, BoxColor.RED, "range", required=True, role="upper-bound"),
        ),
        bars=(
            Bar("left", "range", 0),
            Bar("cursor", "range", 1),
            Bar("right", "range", 2),
        ),
    )


LABEL_OPTIONS = (
    LabelOption("opt-product", "holds the product of the values already processed"),
    LabelOption("opt-sum", "holds the sum of the values already processed", distractor=True),
    LabelOption("opt-remaining", "values that still need to be processed"),
    LabelOption("opt-untouched", "values that must never be read", distractor=True),
)

# --- the code --------------------------------------------------------------

PRODUCT_TEMPLATE = """\
int main(void) {
    int lo;
    int hi;
    int p;
    int i;
    scanf("%d", &lo);
    scanf("%d", &hi);
    /*<editable>*/
    /* initialize and loop here */
    /*</editable>*/
    printf("%d\\n", p);
    return 0;
}
"""

PRODUCT_GOLDEN_CODE = """\
int main(void) {
    int lo;
    int hi;
    int p;
    int i;
    scanf("%d", &lo);
    scanf("%d", &hi);
    /*<editable>*/
    p = 1;
    for (i = lo; i <= hi; i++) {
        p = p * i;
    }
    /*</editable>*/
    printf("%d\\n", p);
    return 0;
}
"""


def _editable(body: str) -> str:
    """Golden code with the editable region replaced by `body` lines."""
    golden_region = "    p = 1;\n    for (i = lo; i <= hi; i++) {\n        p = p * i;\n    }\n"
    return PRODUCT_GOLDEN_CODE.replace(golden_region, body)


# --- the rubric ------------------------------------------------------------

LIBRARY_DOC = {
    "version": 1,
    "records": [
        {
            "code": "E-GLI-ACC-VAR",
            "production": "Gli",
            "nature": "Semantic",
            "gravity": 1,
            "message": "The processed region must name the accumulator holding the product so far.",
            "feedforward": "Chapter 5, Section 2",
        },
        {
            "code": "E-GLI-UNPARSED",
            "production": "Gli",
            "nature": "Syntactic",
            "gravity": 1,
            "message": "A red box contains text that is not a well-formed expression.",
            "feedforward": "Chapter 4, Section 1",
        },
        {
            "code": "E-GLI-REMAINING-FILLED",
            "production": "Gli",
            "nature": "Semantic",
            "gravity": 1,
            "message": "The region still to be processed carries no accumulated value; its box stays blank.",
            "feedforward": "Chapter 5, Section 2",
        },
        {
            "code": "E-GLI-ACHIEVED-LABEL",
            "production": "Gli",
            "nature": "Semantic",
            "gravity": 1,
            "message": "The label over the processed region must describe what has been achieved so far.",
            "feedforward": "Chapter 5, Section 1",
        },
        {
            "code": "E-GLI-BOUNDS",
            "production": "Gli",
            "nature": "Syntactic",
            "gravity": 1,
            "message": "A lower bound lies beyond the bound to its right.",
            "feedforward": "Chapter 5, Section 1",
        },
        {
            "code": "E-GUARD-REF",
            "production": "Code",
            "nature": "Semantic",
            "gravity": 2,
            "message": "The loop guard does not keep the loop running exactly while work remains.",
            "feedforward": "Chapter 6, Section 3",
        },
        {
            "code": "E-STOP-COND",
            "production": "FinalRepresentation",
            "nature": "Semantic",
            "gravity": 1,
            "message": "The final drawing does not yield the expected stop condition.",
            "feedforward": "Chapter 6, Section 2",
        },
        {
            "code": "E-VAR-DECL",
            "production": "Code",
            "nature": "Semantic",
            "gravity": 1,
            "message": "The cursor variable of the drawing must be declared in the code.",
            "feedforward": "Chapter 3, Section 1",
        },
        {
            "code": "E-VAR-INIT",
            "production": "Code",
            "nature": "Semantic",
            "gravity": 2,
            "message": "The accumulator must start at the neutral element of the product.",
            "feedforward": "Chapter 6, Section 1",
        },
        {
            "code": "E-VARIANT-INVALID",
            "production": "VariantFunction",
            "nature": "Semantic",
            "gravity": 2,
            "message": "The variant function must count down the remaining work and reach zero.",
            "feedforward": "Chapter 6, Section 4",
        },
        {
            "code": "E-OUTPUT",
            "production": "Code",
            "nature": "Semantic",
            "gravity": 4,
            "message": "The program output differs from the expected output.",
        },
        {
            "code": "E-TEMPLATE",
            "production": "Code",
            "nature": "Syntactic",
            "gravity": 2,
            "message": "Code outside the editable region was modified.",
        },
        {
            "code": "E-VAR-UNDECLARED",
            "production": "Code",
            "nature": "Semantic",
            "gravity": 1,
            "message": "The drawing refers to a variable the code never declares.",
            "feedforward": "Chapter 3, Section 1",
        },
        {
            "code": "E-INIT-MISMATCH",
            "production": "InitialRepresentation",
            "nature": "Semantic",
            "gravity": 1,
            "message": "The initial drawing does not match the state the code reaches its loop with.",
            "feedforward": "Chapter 6, Section 1",
        },
        {
            "code": "E-GUARD-MISMATCH",
            "production": "Code",
            "nature": "Semantic",
            "gravity": 2,
            "message": "The loop guard is not the negation of the stop condition derived from the final drawing.",
            "feedforward": "Chapter 6, Section 3",
        },
        {
            "code": "E-CONSISTENCY-UNCHECKABLE",
            "production": "Code",
            "nature": "Semantic",
            "gravity": 0,
            "message": "Some drawing/code consistency checks could not be run on this submission.",
        },
    ],
    "rules": [],
}

RUBRIC_BINDINGS = (
    RuleBinding("E-GLI-ACC-VAR", "BoxEquals", {"box": 1, "expected": "p"}),
    RuleBinding("E-GLI-UNPARSED", "BoxParses", {"box": 1}),
    RuleBinding("E-GLI-UNPARSED", "BoxParses", {"box": 3}),
    RuleBinding("E-GLI-REMAINING-FILLED", "BoxBlank", {"box": 3, "expect": "blank"}),
    RuleBinding("E-GLI-ACHIEVED-LABEL", "LabelIs", {"box": 2, "option": "opt-product"}),
    RuleBinding("E-GLI-BOUNDS", "BoundsOrdered", {}),
    RuleBinding("E-GUARD-REF", "GuardEquivalent", {"loop": 1, "reference": "i <= hi"}),
    RuleBinding("E-STOP-COND", "StopConditionMatches", {"expected": "i = hi + 1"}),
    RuleBinding("E-VAR-DECL", "VarDeclared", {"name": "i"}),
    RuleBinding("E-VAR-INIT", "VarInitializedTo", {"name": "p", "value": 1}),
    RuleBinding("E-VARIANT-INVALID", "VariantValid", {"loop": 1}),
    RuleBinding("E-OUTPUT", "OutputMatchesTests", {}),
    RuleBinding("E-TEMPLATE", "TemplateRespected", {}),
)

# The library document ships the same rule instances as reusable defaults.
LIBRARY_DOC["rules"] = [
    {"code": r.code, "predicate": r.predicate, "params": r.params} for r in RUBRIC_BINDINGS
]


# --- statements ------------------------------------------------------------

UTC = timezone.utc
SEMESTER_START = datetime(2022, 9, 13, tzinfo=UTC)
SEMESTER_END = datetime(2022, 12, 16, tzinfo=UTC)

# Wednesday 6PM to Friday 8PM, Brussels time, expressed in UTC (CEST/CET).
_CHALLENGE_OPENS = [
    datetime(2022, 9, 14, 16, 0, tzinfo=UTC),   # ch-0, the onboarding run
    datetime(2022, 9, 28, 16, 0, tzinfo=UTC),
    datetime(2022, 10, 12, 16, 0, tzinfo=UTC),
    datetime(2022, 10, 26, 16, 0, tzinfo=UTC),
    datetime(2022, 11, 9, 17, 0, tzinfo=UTC),   # winter time from Oct 30
    datetime(2022, 11, 23, 17, 0, tzinfo=UTC),
    datetime(2022, 12, 7, 17, 0, tzinfo=UTC),
]


def product_flow() -> ResolutionFlow:
    return ResolutionFlow(
        productions=(
            Production("gli", ProductionKind.GLI, Phase.ABSTRACTION, 1, 4),
            Production("init", ProductionKind.INITIAL_REPRESENTATION, Phase.BRIDGE, 2, 2),
            Production("final", ProductionKind.FINAL_REPRESENTATION, Phase.BRIDGE, 3, 2),
            Production("variant", ProductionKind.VARIANT_FUNCTION, Phase.BRIDGE, 4, 2),
            Production("code", ProductionKind.CODE, Phase.CONCRETE, 5, 10),
        ),
        locks=(("init", "gli"), ("final", "gli"), ("variant", "gli"), ("code", "gli")),
    )


def challenge_statement(number: int) -> Statement:
    """Challenge `number` (0..6). Challenge 0 is the ungraded onboarding one;
    the others weigh 2% of the course mark each."""
    opens = _CHALLENGE_OPENS[number]
    return Statement(
        id=f"ch-{number}",
        title=f"Challenge {number}: product of a range",
        prose=(
            "Read two integers lo and hi from the input, then print the product "
            "of all integers between lo and hi (both included). Model your loop "
            "on the drawing before writing the code."
        ),
        flow=product_flow(),
        gli=product_descriptor(),
        label_options=LABEL_OPTIONS,
        code_template=PRODUCT_TEMPLATE,
        test_cases=(
            TestCase("1 4", "24\n"),
            TestCase("3 3", "3\n"),
            TestCase("2 5", "120\n"),
        ),
        rubric_bindings=RUBRIC_BINDINGS,
        window=Window(opens_at=opens, closes_at=opens + timedelta(hours=50)),
        weight_percent=Fraction(0) if number == 0 else Fraction(2),
        formative_only=number == 0,
    )


def golden_statement() -> Statement:
    return challenge_statement(2)


# --- submissions -----------------------------------------------------------


def golden_gli(red=None, green=None, bars=None) -> FilledGli:
    """The golden drawing, with per-slot updates; a None value drops a slot."""

    def merged(base: dict, updates: dict | None) -> dict:
        out = dict(base)
        for key, value in (updates or {}).items():
            if value is None:
                out.pop(key, None)
            else:
                out[key] = value
        return out

    return FilledGli(
        descriptor_ref=DESCRIPTOR_ID,
        red_assignments=merged({1: "p", 3: "", 5: "lo", 6: "hi"}, red),
        green_assignments=merged({2: "opt-product", 4: "opt-remaining"}, green),
        bar_positions=merged({"left": "lo", "cursor": "i", "right": "hi"}, bars),
    )


def golden_payloads() -> dict:
    return {
        "gli": golden_gli(),
        "init": {"left": "lo", "cursor": "lo", "right": "hi"},
        "final": {"left": "lo", "cursor": "hi + 1", "right": "hi"},
        "variant": "hi - i + 1",
        "code": PRODUCT_GOLDEN_CODE,
    }


def make_submission(name_seq: int, payload_overrides: dict, student="s001") -> Submission:
    payloads = golden_payloads()
    payloads.update(payload_overrides)
    return Submission(
        student_id=student,
        statement_id="ch-2",
        at=datetime(2022, 9, 28, 17, 0, tzinfo=UTC) + timedelta(minutes=name_seq),
        payloads=payloads,
        seq=name_seq,
    )


def corpus() -> dict[str, Submission]:
    """One golden submission plus one per injected fault, in a fixed order."""
    entries: dict[str, dict] = {
        "golden": {},
        "wrong-accumulator": {"gli": golden_gli(red={1: "i"})},
        "unparseable-box": {"gli": golden_gli(red={1: "p +"})},
        "blank-accumulator": {"gli": golden_gli(red={1: ""})},
        "remaining-filled": {"gli": golden_gli(red={3: "0"})},
        "wrong-label": {"gli": golden_gli(green={2: "opt-sum"})},
        "label-missing": {"gli": golden_gli(green={2: None})},
        "bounds-constant-swap": {"gli": golden_gli(red={5: "5", 6: "2"})},
        "initial-off-by-one": {"init": {"left": "lo", "cursor": "lo + 1", "right": "hi"}},
        "final-cursor-short": {"final": {"left": "lo", "cursor": "hi", "right": "hi"}},
        "variant-increasing": {"variant": "i"},
        "variant-off-by-one": {"variant": "hi - i"},
        "guard-strict": {"code": PRODUCT_GOLDEN_CODE.replace("i <= hi", "i < hi")},
        "accumulator-starts-at-zero": {"code": PRODUCT_GOLDEN_CODE.replace("p = 1;", "p = 0;")},
        "frozen-line-edited": {
            "code": PRODUCT_GOLDEN_CODE.replace('printf("%d\\n", p);', 'printf("%d", p);')
        },
        "sum-instead-of-product": {"code": PRODUCT_GOLDEN_CODE.replace("p = p * i;", "p = p + i;")},
        "undeclared-in-drawing": {"gli": golden_gli(bars={"cursor": "j"})},
        "does-not-compile": {
            "code": _editable(
                "    p = 1;\n    for (i = lo; i <= hi; i++) {\n        q = q * i;\n    }\n"
            )
        },
    }
    return {
        name: make_submission(seq, overrides)
        for seq, (name, overrides) in enumerate(entries.items(), start=1)
    }


# --- a semester of activity -------------------------------------------------

REGISTERED_COUNT = 97
CONNECTED_COUNT = 80
ALL_SIX_COUNT = 23


def roster() -> list[str]:
    return [f"s{n:03d}" for n in range(1, REGISTERED_COUNT + 1)]


def participation_plan() -> dict[str, list[int]]:
    """Which challenges (1..6) each student submits to, certificatively.

    Built to the semester's shape: 80 of 97 registered students participate
    in challenge 1, exactly 23 carry all six challenges, and the rest taper
    off over prefixes of the sequence.
    """
    plan: dict[str, list[int]] = {}
    students = roster()
    for student in students[:ALL_SIX_COUNT]:
        plan[student] = [1, 2, 3, 4, 5, 6]
    for idx, student in enumerate(students[ALL_SIX_COUNT:CONNECTED_COUNT]):
        plan[student] = list(range(1, 2 + idx % 5))  # prefixes of length 1..5
    for student in students[CONNECTED_COUNT:]:
        plan[student] = []  # registered, never participated
    return plan


def interaction_log() -> list[tuple[str, datetime]]:
    """(student, instant) authenticated interactions over the semester.

    Participating students interact inside every certificative window they
    take part in (several times, minutes apart, so sessionization matters),
    and the all-six group also trickles in on scattered weekdays.
    """
    events: list[tuple[str, datetime]] = []
    plan = participation_plan()
    for student, challenges in plan.items():
        for number in challenges:
            opens = _CHALLENGE_OPENS[number]
            base = opens + timedelta(hours=2)
            # one evening session of three interactions, then one next day
            events.append((student, base))
            events.append((student, base + timedelta(minutes=10)))
            events.append((student, base + timedelta(minutes=25)))
            events.append((student, base + timedelta(days=1)))
    # connected students who never submitted still logged in once
    for idx, student in enumerate(roster()[:CONNECTED_COUNT]):
        if not plan[student]:
            events.append((student, SEMESTER_START + timedelta(days=1 + idx % 5, hours=9)))
    # a sprinkle of autonomous practice by the dedicated group
    for idx, student in enumerate(roster()[:ALL_SIX_COUNT]):
        events.append((student, datetime(2022, 11, 2, 14, 30, tzinfo=UTC) + timedelta(days=idx % 7)))
    events.sort(key=lambda e: (e[1], e[0]))
    return events


def certificative_submission_log() -> list[tuple[str, str, datetime]]:
    """(student, statement id, instant) one certificative submission per
    planned participation."""
    log: list[tuple[str, str, datetime]] = []
    for student, challenges in participation_plan().items():
        for number in challenges:
            at = _CHALLENGE_OPENS[number] + timedelta(hours=3)
            log.append((student, f"ch-{number}", at))
    log.sort(key=lambda e: (e[2], e[0], e[1]))
    return log
