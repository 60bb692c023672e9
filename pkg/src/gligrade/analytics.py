"""Learning analytics over the append-only activity log: daily session
counts (calendar-heatmap data), participation patterns (upset-plot data),
and per-student progress summaries.

Everything is a pure function of the log; recomputation from the stored
events reproduces results byte-identically.  Data comes out as tables
(CSV/JSON); rendering is a client concern.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone

from .activity import ChallengeLedger, Mode, challenge_mark
from .model import Statement, format_instant

# Interactions less than this far apart belong to one session.
SESSION_GAP = timedelta(minutes=30)


@dataclass(frozen=True)
class InteractionEvent:
    """One authenticated interaction with the platform."""

    student_id: str
    at: datetime


@dataclass(frozen=True)
class SessionEvent:
    """A derived session start: the first interaction, or one at least
    SESSION_GAP after the student's previous interaction."""

    student_id: str
    started_at: datetime


class EventLog:
    """Append-only, duplicate-tolerant event store (identical tuples are
    kept once). Ingestion is serialized by the caller; reads snapshot."""

    def __init__(self):
        self._events: list[InteractionEvent] = []
        self._seen: set[tuple[str, datetime]] = set()

    def ingest(self, event: InteractionEvent) -> bool:
        key = (event.student_id, event.at)
        if key in self._seen:
            return False
        self._seen.add(key)
        self._events.append(event)
        return True

    def snapshot(self) -> list[InteractionEvent]:
        return sorted(self._events, key=lambda e: (e.at, e.student_id))


def sessionize(events: list[InteractionEvent], gap: timedelta = SESSION_GAP) -> list[SessionEvent]:
    by_student: dict[str, list[datetime]] = {}
    for e in events:
        by_student.setdefault(e.student_id, []).append(e.at)
    sessions: list[SessionEvent] = []
    for student, instants in by_student.items():
        instants.sort()
        previous = None
        for at in instants:
            if previous is None or at - previous >= gap:
                sessions.append(SessionEvent(student, at))
            previous = at
    sessions.sort(key=lambda s: (s.started_at, s.student_id))
    return sessions


def daily_sessions(
    events: list[InteractionEvent], start: date, end: date
) -> dict[date, int]:
    """Distinct students having started a session per UTC day; every day of
    [start, end] is present, zeros included."""
    if end < start:
        raise ValueError("empty date range")
    students_by_day: dict[date, set[str]] = {}
    for session in sessionize(events):
        day = session.started_at.astimezone(timezone.utc).date()
        students_by_day.setdefault(day, set()).add(session.student_id)
    out: dict[date, int] = {}
    day = start
    while day <= end:
        out[day] = len(students_by_day.get(day, ()))
        day += timedelta(days=1)
    return out


def distinct_connected(events: list[InteractionEvent]) -> int:
    return len({e.student_id for e in events})


@dataclass(frozen=True)
class ParticipationMatrix:
    """Exact-subset participation counts, upset-plot convention: a pattern
    counts the students whose participated-set equals exactly that subset."""

    pattern_counts: dict[frozenset, int]
    per_challenge_total: dict[str, int]
    pattern_size_counts: dict[int, int]

    def sorted_patterns(self) -> list[tuple[frozenset, int]]:
        return sorted(
            self.pattern_counts.items(),
            key=lambda item: (-item[1], tuple(sorted(item[0]))),
        )

    @property
    def participating_students(self) -> int:
        return sum(self.pattern_counts.values())


def participation_patterns(
    submissions: list[tuple[str, str, Mode]] | list[tuple[str, str]],
) -> ParticipationMatrix:
    """Build the matrix from (student, challenge[, mode]) submission entries;
    participation means at least one certificative submission."""
    by_student: dict[str, set[str]] = {}
    for entry in submissions:
        if len(entry) == 3 and entry[2] is not Mode.CERTIFICATIVE:
            continue
        student, challenge = entry[0], entry[1]
        by_student.setdefault(student, set()).add(challenge)

    pattern_counts: dict[frozenset, int] = {}
    per_challenge: dict[str, int] = {}
    size_counts: dict[int, int] = {}
    for challenges in by_student.values():
        if not challenges:
            continue
        pattern = frozenset(challenges)
        pattern_counts[pattern] = pattern_counts.get(pattern, 0) + 1
        size_counts[len(pattern)] = size_counts.get(len(pattern), 0) + 1
        for c in pattern:
            per_challenge[c] = per_challenge.get(c, 0) + 1
    return ParticipationMatrix(
        pattern_counts=pattern_counts,
        per_challenge_total=per_challenge,
        pattern_size_counts=size_counts,
    )


@dataclass(frozen=True)
class ProgressSummary:
    student_id: str
    latest_grades: dict[str, str]  # statement id -> mark kind or fraction
    error_frequencies: list[tuple[str, int]]  # descending count, then code
    sessions: int


class UnknownStudent(Exception):
    def __init__(self, student_id: str):
        super().__init__(student_id)
        self.code = "UNKNOWN_STUDENT"
        self.student_id = student_id


def progress_summary(
    student_id: str,
    ledgers: dict[str, ChallengeLedger],
    statements: list[Statement],
    reports: list[tuple[str, dict]],
    events: list[InteractionEvent],
) -> ProgressSummary:
    """Where a student stands: latest mark per challenge, how often each
    mistake code came up over all their feedback, session count."""
    seen = set(ledgers) | {s for s, _ in reports} | {e.student_id for e in events}
    if student_id not in seen:
        raise UnknownStudent(student_id)

    ledger = ledgers.get(student_id)
    latest: dict[str, str] = {}
    for st in statements:
        if ledger is None:
            latest[st.id] = "no-attempt"
            continue
        mark = challenge_mark(ledger, st)
        latest[st.id] = str(mark.fraction) if mark.kind == "graded" else mark.kind

    counts: dict[str, int] = {}
    for owner, report_doc in reports:
        if owner != student_id:
            continue
        for production in report_doc.get("per-production", []):
            for comment in production.get("comments", []):
                code = comment["code"]
                counts[code] = counts.get(code, 0) + 1
    frequencies = sorted(counts.items(), key=lambda item: (-item[1], item[0]))

    sessions = sum(1 for s in sessionize(events) if s.student_id == student_id)
    return ProgressSummary(
        student_id=student_id,
        latest_grades=latest,
        error_frequencies=frequencies,
        sessions=sessions,
    )


# ---------------------------------------------------------------------------
# Exports
# ---------------------------------------------------------------------------


def daily_sessions_csv(counts: dict[date, int]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["date", "count"])
    for day in sorted(counts):
        writer.writerow([day.isoformat(), counts[day]])
    return buffer.getvalue()


def participation_csv(matrix: ParticipationMatrix) -> str:
    """`pattern;count` rows, the pattern being the challenge ids joined by
    commas, largest pattern count first."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, delimiter=";", lineterminator="\n")
    writer.writerow(["pattern", "count"])
    for pattern, count in matrix.sorted_patterns():
        writer.writerow([",".join(sorted(pattern)), count])
    return buffer.getvalue()


def progress_json(summary: ProgressSummary) -> str:
    doc = {
        "student-id": summary.student_id,
        "latest-grades": dict(sorted(summary.latest_grades.items())),
        "error-frequencies": [
            {"code": code, "count": count} for code, count in summary.error_frequencies
        ],
        "sessions": summary.sessions,
    }
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


def interactions_to_docs(events: list[InteractionEvent]) -> list[dict]:
    return [
        {"student-id": e.student_id, "at": format_instant(e.at)} for e in events
    ]
