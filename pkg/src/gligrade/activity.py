"""Challenge lifecycle: certificative windows, submission quotas, the
latest-counts marking rule, trump cards, and course-mark aggregation.

Ledgers are immutable values; every update returns a new ledger.  The
storage layer serializes updates per (student, statement), so these
functions never need locks of their own.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from fractions import Fraction

from .model import Statement, format_instant, format_rational, parse_instant, parse_rational

CERTIFICATIVE_QUOTA = 3


class WindowState(str, Enum):
    BEFORE_OPEN = "BeforeOpen"
    CERTIFICATIVE = "Certificative"
    FORMATIVE = "Formative"


class Mode(str, Enum):
    CERTIFICATIVE = "Certificative"
    FORMATIVE = "Formative"


@dataclass(frozen=True)
class SubmissionRecord:
    seq: int
    at: datetime
    grade_fraction: Fraction
    mode: Mode


@dataclass(frozen=True)
class ChallengeLedger:
    student_id: str
    per_statement: dict[str, tuple[SubmissionRecord, ...]]
    trump: str | None = None

    def records(self, statement_id: str) -> tuple[SubmissionRecord, ...]:
        return self.per_statement.get(statement_id, ())


def new_ledger(student_id: str) -> ChallengeLedger:
    return ChallengeLedger(student_id=student_id, per_statement={})


def window_state(st: Statement, now: datetime) -> WindowState:
    """Half-open window [opens-at, closes-at): every instant classifies
    exactly once."""
    if now < st.window.opens_at:
        return WindowState.BEFORE_OPEN
    if now < st.window.closes_at:
        return WindowState.CERTIFICATIVE
    return WindowState.FORMATIVE


@dataclass(frozen=True)
class Decision:
    accepted: bool
    mode: Mode | None = None
    reason: str | None = None  # NOT_OPEN | QUOTA_EXCEEDED


NOT_OPEN = "NOT_OPEN"
QUOTA_EXCEEDED = "QUOTA_EXCEEDED"


def certificative_count(ledger: ChallengeLedger, statement_id: str) -> int:
    return sum(1 for r in ledger.records(statement_id) if r.mode is Mode.CERTIFICATIVE)


def accept_submission(ledger: ChallengeLedger, st: Statement, now: datetime) -> Decision:
    """Up to three certificative submissions inside the window; unlimited
    training once it has closed (graded, but never counted)."""
    state = window_state(st, now)
    if state is WindowState.BEFORE_OPEN:
        return Decision(accepted=False, reason=NOT_OPEN)
    if state is WindowState.FORMATIVE:
        return Decision(accepted=True, mode=Mode.FORMATIVE)
    if certificative_count(ledger, st.id) >= CERTIFICATIVE_QUOTA:
        return Decision(accepted=False, reason=QUOTA_EXCEEDED)
    return Decision(accepted=True, mode=Mode.CERTIFICATIVE)


def record_submission(
    ledger: ChallengeLedger,
    st: Statement,
    at: datetime,
    grade_fraction: Fraction,
    mode: Mode,
) -> tuple[ChallengeLedger, int]:
    """Append a graded submission; seq is gapless per (student, statement)."""
    existing = ledger.records(st.id)
    seq = len(existing) + 1
    record = SubmissionRecord(seq=seq, at=at, grade_fraction=grade_fraction, mode=mode)
    per_statement = dict(ledger.per_statement)
    per_statement[st.id] = existing + (record,)
    return replace(ledger, per_statement=per_statement), seq


@dataclass(frozen=True)
class ChallengeMark:
    kind: str  # "graded" | "skipped" | "no-attempt"
    fraction: Fraction = Fraction(0)


def challenge_mark(ledger: ChallengeLedger, st: Statement) -> ChallengeMark:
    """The latest certificative submission determines the mark, never the
    best one; a trumped challenge is skipped; no attempt scores zero."""
    if ledger.trump == st.id:
        return ChallengeMark("skipped")
    certs = [r for r in ledger.records(st.id) if r.mode is Mode.CERTIFICATIVE]
    if not certs:
        return ChallengeMark("no-attempt")
    latest = max(certs, key=lambda r: r.seq)
    return ChallengeMark("graded", latest.grade_fraction)


class TrumpError(Exception):
    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}{f': {detail}' if detail else ''}")
        self.code = code
        self.detail = detail


TRUMP_ALREADY_PLAYED = "TRUMP_ALREADY_PLAYED"
TRUMP_ON_FORMATIVE = "TRUMP_ON_FORMATIVE"


def play_trump(ledger: ChallengeLedger, st: Statement) -> ChallengeLedger:
    """One per student per semester, irrevocable, never on an ungraded
    statement (it already counts for nothing)."""
    if ledger.trump is not None:
        raise TrumpError(TRUMP_ALREADY_PLAYED, ledger.trump)
    if st.formative_only:
        raise TrumpError(TRUMP_ON_FORMATIVE, st.id)
    return replace(ledger, trump=st.id)


def course_pca_mark(
    ledger: ChallengeLedger, statements: list[Statement]
) -> tuple[Fraction, Fraction]:
    """(earned percent, attainable percent) over the graded challenges.

    A trumped challenge's weight leaves both sides; ungraded statements
    never enter; a challenge without any attempt contributes zero earned
    but full attainable weight.
    """
    earned = Fraction(0)
    attainable = Fraction(0)
    for st in statements:
        if st.formative_only:
            continue
        mark = challenge_mark(ledger, st)
        if mark.kind == "skipped":
            continue
        attainable += st.weight_percent
        earned += st.weight_percent * mark.fraction
    return earned, attainable


# --- JSON ------------------------------------------------------------------


def ledger_to_doc(ledger: ChallengeLedger) -> dict:
    return {
        "student-id": ledger.student_id,
        "per-statement": {
            sid: [
                {
                    "seq": r.seq,
                    "at": format_instant(r.at),
                    "grade-fraction": format_rational(r.grade_fraction),
                    "mode": r.mode.value,
                }
                for r in records
            ]
            for sid, records in sorted(ledger.per_statement.items())
        },
        "trump": ledger.trump,
    }


def ledger_from_doc(doc: dict) -> ChallengeLedger:
    return ChallengeLedger(
        student_id=doc["student-id"],
        per_statement={
            sid: tuple(
                SubmissionRecord(
                    seq=r["seq"],
                    at=parse_instant(r["at"]),
                    grade_fraction=parse_rational(r["grade-fraction"]),
                    mode=Mode(r["mode"]),
                )
                for r in records
            )
            for sid, records in doc.get("per-statement", {}).items()
        },
        trump=doc.get("trump"),
    )
