"""HTTP facade: bearer-token principals, synchronous grading, JSON errors.

Grading is synchronous by design: a submission is corrected inside the
request and the feedback report is the response body.  The report, the
ledger update and the analytics event are journaled as one event, so either
all of them persist or none do.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, timezone
from fractions import Fraction

from fastapi import Depends, FastAPI, Header, Request, Response
from fastapi.responses import JSONResponse

from .. import fixtures
from ..activity import (
    CERTIFICATIVE_QUOTA,
    Mode,
    TrumpError,
    accept_submission,
    certificative_count,
    ledger_from_doc,
    ledger_to_doc,
    new_ledger,
    play_trump,
    record_submission,
)
from ..analytics import (
    InteractionEvent,
    ProgressSummary,
    UnknownStudent,
    daily_sessions,
    participation_patterns,
    progress_json,
    progress_summary,
)
from ..csubset import (
    CRuntimeError,
    CSyntaxError,
    StepBudgetExceeded,
    UndeclaredVariable,
    interpret,
    parse_program,
    DEFAULT_STEP_BUDGET,
)
from ..grading import PayloadMismatch, correct_submission, report_to_doc
from ..model import (
    canonical_json,
    format_instant,
    parse_instant,
    statement_from_doc,
    statement_to_doc,
    submission_from_doc,
    validate_statement,
)
from ..rubric import Library, LibraryError, load_library, validate_rules
from .store import Store


@dataclass(frozen=True)
class Principal:
    id: str
    role: str  # "Student" | "Supervisor"


def error(status: int, code: str, message: str, detail=None) -> JSONResponse:
    body = {"code": code, "message": message}
    if detail is not None:
        body["detail"] = detail
    return JSONResponse(status_code=status, content=body)


def json_response(doc, status: int = 200, headers: dict | None = None) -> Response:
    return Response(
        content=canonical_json(doc),
        status_code=status,
        media_type="application/json",
        headers=headers,
    )


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


def create_app(config: dict, store: Store | None = None) -> FastAPI:
    app = FastAPI(title="gligrade", docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.store = store or Store(config.get("data-dir", "./data"))
    app.state.library = load_library(config.get("library", fixtures.LIBRARY_DOC))
    app.state.tokens = config.get("tokens", {})
    app.state.step_budget = config.get("step-budget", DEFAULT_STEP_BUDGET)
    app.state.trust_client_at = bool(config.get("trust-client-at", False))

    def principal_of(authorization: str | None = Header(default=None)) -> Principal:
        if not authorization or not authorization.startswith("Bearer "):
            raise ApiError(401, "UNAUTHORIZED", "missing bearer token")
        token = authorization.removeprefix("Bearer ")
        entry = app.state.tokens.get(token)
        if entry is None:
            raise ApiError(401, "UNAUTHORIZED", "unknown token")
        return Principal(id=entry["id"], role=entry["role"])

    def require(principal: Principal, role: str):
        if principal.role != role:
            raise ApiError(403, "FORBIDDEN", f"requires the {role} role")

    @app.exception_handler(ApiError)
    async def handle_api_error(_request: Request, exc: ApiError):
        return error(exc.status, exc.code, exc.message, exc.detail)

    def now_of(body: dict | None) -> datetime:
        if app.state.trust_client_at and body and "at" in body:
            return parse_instant(body["at"])
        return datetime.now(timezone.utc)

    def get_statement_or_404(statement_id: str):
        doc = app.state.store.state.latest_statement(statement_id)
        if doc is None:
            raise ApiError(404, "UNKNOWN_STATEMENT", f"no statement {statement_id!r}")
        return statement_from_doc(doc)

    def ledger_of(student_id: str):
        doc = app.state.store.state.ledgers.get(student_id)
        return ledger_from_doc(doc) if doc else new_ledger(student_id)

    def interactions():
        return [
            InteractionEvent(d["student-id"], parse_instant(d["at"]))
            for d in app.state.store.state.interactions
        ]

    # --- endpoints ---------------------------------------------------------

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/statements")
    async def encode_statement(request: Request, principal: Principal = Depends(principal_of)):
        require(principal, "Supervisor")
        doc = await request.json()
        try:
            statement = statement_from_doc(doc)
        except (KeyError, ValueError) as err:
            raise ApiError(422, "STATEMENT_MALFORMED", str(err))
        result = validate_statement(statement)
        if not result.ok:
            first = result.violations[0]
            raise ApiError(422, first.code, "statement validation failed", result.codes())
        try:
            validate_rules(statement.rubric_bindings, app.state.library.records)
        except LibraryError as err:
            raise ApiError(422, err.code, "rubric binding validation failed", err.detail)
        canonical = statement_to_doc(statement)
        app.state.store.append({"kind": "statement", "doc": canonical})
        version = len(app.state.store.state.statements[statement.id])
        return json_response({"id": statement.id, "version": version}, status=201)

    @app.get("/api/statements/{statement_id}")
    def get_statement(statement_id: str, principal: Principal = Depends(principal_of)):
        del principal  # any authenticated role may read statements
        doc = app.state.store.state.latest_statement(statement_id)
        if doc is None:
            raise ApiError(404, "UNKNOWN_STATEMENT", f"no statement {statement_id!r}")
        return json_response(doc)

    @app.post("/api/statements/{statement_id}/submissions")
    async def submit(
        statement_id: str, request: Request, principal: Principal = Depends(principal_of)
    ):
        require(principal, "Student")
        body = await request.json()
        statement = get_statement_or_404(statement_id)
        now = now_of(body)
        ledger = ledger_of(principal.id)
        decision = accept_submission(ledger, statement, now)
        if not decision.accepted:
            raise ApiError(409, decision.reason, "submission rejected")
        submission_doc = {
            "student-id": principal.id,
            "statement-id": statement_id,
            "at": format_instant(now),
            "seq": len(ledger.records(statement_id)) + 1,
            "payloads": body.get("payloads", {}),
        }
        try:
            submission = submission_from_doc(submission_doc, statement.flow)
        except (KeyError, TypeError, ValueError) as err:
            raise ApiError(422, "PAYLOAD_MISMATCH", f"malformed payload: {err}")
        try:
            report = correct_submission(submission, statement, app.state.library)
        except PayloadMismatch as err:
            raise ApiError(422, "PAYLOAD_MISMATCH", str(err))
        if report.total_possible:
            fraction = Fraction(report.total_earned) / Fraction(report.total_possible)
        else:
            fraction = Fraction(1)
        ledger, seq = record_submission(ledger, statement, now, fraction, decision.mode)
        submission_doc["seq"] = seq
        sub_id = app.state.store.next_submission_id()
        report_doc = report_to_doc(report)
        app.state.store.append(
            {
                "kind": "submission",
                "id": sub_id,
                "doc": submission_doc,
                "mode": decision.mode.value,
                "report": report_doc,
                "ledger": ledger_to_doc(ledger),
                "interaction": {"student-id": principal.id, "at": format_instant(now)},
            }
        )
        remaining = (
            CERTIFICATIVE_QUOTA - certificative_count(ledger, statement_id)
            if decision.mode is Mode.CERTIFICATIVE
            else -1
        )
        return json_response(
            report_doc,
            headers={
                "X-Submission-Id": sub_id,
                "X-Mode": decision.mode.value,
                "X-Remaining-Attempts": str(remaining),
            },
        )

    @app.get("/api/submissions/{sub_id}/feedback")
    def feedback(sub_id: str, principal: Principal = Depends(principal_of)):
        entry = app.state.store.state.submissions.get(sub_id)
        if entry is None:
            raise ApiError(404, "UNKNOWN_SUBMISSION", f"no submission {sub_id!r}")
        owner = entry["doc"]["student-id"]
        if principal.role != "Supervisor" and principal.id != owner:
            raise ApiError(403, "FORBIDDEN", "not your submission")
        return json_response(app.state.store.state.reports[sub_id])

    @app.post("/api/playground/{statement_id}")
    async def playground(
        statement_id: str, request: Request, principal: Principal = Depends(principal_of)
    ):
        require(principal, "Student")
        body = await request.json()
        get_statement_or_404(statement_id)  # playground is scoped to a statement
        now = now_of(body)
        app.state.store.append(
            {"kind": "interaction", "student-id": principal.id, "at": format_instant(now)}
        )
        source = body.get("source", "")
        stdin = body.get("stdin", "")
        try:
            program = parse_program(source)
        except (CSyntaxError, UndeclaredVariable) as err:
            return json_response({"error": {"code": err.code, "message": str(err)}})
        try:
            result = interpret(program, stdin, app.state.step_budget)
        except (CRuntimeError, StepBudgetExceeded) as err:
            return json_response({"error": {"code": err.code, "message": str(err)}})
        return json_response(
            {"stdout": result.stdout, "exit-code": result.exit_code, "steps": result.steps}
        )

    @app.post("/api/trump/{statement_id}")
    async def trump(
        statement_id: str, request: Request, principal: Principal = Depends(principal_of)
    ):
        require(principal, "Student")
        body = await request.json() if await request.body() else {}
        statement = get_statement_or_404(statement_id)
        ledger = ledger_of(principal.id)
        try:
            ledger = play_trump(ledger, statement)
        except TrumpError as err:
            raise ApiError(409, err.code, str(err))
        now = now_of(body)
        app.state.store.append(
            {
                "kind": "trump",
                "student-id": principal.id,
                "statement-id": statement_id,
                "at": format_instant(now),
                "ledger": ledger_to_doc(ledger),
            }
        )
        return json_response({"trump": statement_id})

    @app.get("/api/progress/me")
    def progress_me(principal: Principal = Depends(principal_of)):
        require(principal, "Student")
        state = app.state.store.state
        ledgers = {sid: ledger_from_doc(doc) for sid, doc in state.ledgers.items()}
        statements = [
            statement_from_doc(versions[-1]) for versions in state.statements.values()
        ]
        reports = [
            (state.submissions[sub_id]["doc"]["student-id"], state.reports[sub_id])
            for sub_id in state.reports
        ]
        try:
            summary = progress_summary(
                principal.id, ledgers, statements, reports, interactions()
            )
        except UnknownStudent:
            # a brand-new student still has an (empty) progress view
            summary = ProgressSummary(
                principal.id,
                {st.id: "no-attempt" for st in statements},
                [],
                0,
            )
        return Response(content=progress_json(summary), media_type="application/json")

    @app.get("/api/analytics/daily-sessions")
    def analytics_daily(
        principal: Principal = Depends(principal_of),
        start: str | None = None,
        end: str | None = None,
    ):
        require(principal, "Supervisor")
        events = interactions()
        if not events and (start is None or end is None):
            return json_response({"daily-sessions": []})
        first = date.fromisoformat(start) if start else min(e.at for e in events).date()
        last = date.fromisoformat(end) if end else max(e.at for e in events).date()
        counts = daily_sessions(events, first, last)
        return json_response(
            {
                "daily-sessions": [
                    {"date": day.isoformat(), "count": counts[day]} for day in sorted(counts)
                ]
            }
        )

    @app.get("/api/analytics/participation")
    def analytics_participation(principal: Principal = Depends(principal_of)):
        require(principal, "Supervisor")
        state = app.state.store.state
        entries = []
        for sub_id in state.submissions:
            entry = state.submissions[sub_id]
            entries.append(
                (entry["doc"]["student-id"], entry["doc"]["statement-id"], Mode(entry["mode"]))
            )
        matrix = participation_patterns(entries)
        return json_response(
            {
                "patterns": [
                    {"pattern": sorted(pattern), "count": count}
                    for pattern, count in matrix.sorted_patterns()
                ],
                "per-challenge": dict(sorted(matrix.per_challenge_total.items())),
            }
        )

    return app


def seed_fixtures(store: Store) -> list[str]:
    """Publish the shipped challenge statements into a store."""
    ids = []
    for number in range(7):
        doc = statement_to_doc(fixtures.challenge_statement(number))
        store.append({"kind": "statement", "doc": doc})
        ids.append(doc["id"])
    return ids
