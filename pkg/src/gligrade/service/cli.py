"""Admin command line.

Exit codes: 0 success, 2 unreadable input (bad JSON, missing file),
3 domain rejection (unknown statement/student, payload mismatch), 1 anything
else.

    gligrade serve --config cfg.json
    gligrade seed --data-dir DIR
    gligrade grade --statement ch-2 --submission-file sub.json [--data-dir DIR]
    gligrade export-analytics --out DIR --data-dir DIR
    gligrade mark --student s001 --challenge ch-2 --data-dir DIR
    gligrade pca-mark --student s001 --data-dir DIR
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import date
from pathlib import Path

from .. import fixtures
from ..activity import challenge_mark, course_pca_mark, ledger_from_doc, new_ledger
from ..analytics import (
    InteractionEvent,
    UnknownStudent,
    daily_sessions,
    daily_sessions_csv,
    participation_csv,
    participation_patterns,
    progress_json,
    progress_summary,
)
from ..activity import Mode
from ..grading import PayloadMismatch, correct_submission, report_to_json
from ..model import parse_instant, statement_from_doc, submission_from_doc
from ..rubric import load_library
from .store import Store

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_DOMAIN = 3


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        print(f"cannot read {path}: {err}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _load_statement(args) -> tuple:
    """Statement + library, from a data dir when given, else the shipped
    fixture pack."""
    library = load_library(fixtures.LIBRARY_DOC)
    if args.data_dir:
        store = Store(args.data_dir)
        doc = store.state.latest_statement(args.statement)
        if doc is None:
            print(f"unknown statement {args.statement!r}", file=sys.stderr)
            raise SystemExit(EXIT_DOMAIN)
        return statement_from_doc(doc), library
    for number in range(7):
        statement = fixtures.challenge_statement(number)
        if statement.id == args.statement:
            return statement, library
    print(f"unknown statement {args.statement!r}", file=sys.stderr)
    raise SystemExit(EXIT_DOMAIN)


def cmd_serve(args) -> int:
    import uvicorn

    from .app import create_app

    config = _load_json(args.config)
    listen = config.get("listen", "127.0.0.1:8000")
    host, _, port = listen.partition(":")
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="warning")
    return EXIT_OK


def cmd_seed(args) -> int:
    from .app import seed_fixtures

    store = Store(args.data_dir)
    ids = seed_fixtures(store)
    print(f"seeded {len(ids)} statements: {', '.join(ids)}")
    return EXIT_OK


def cmd_grade(args) -> int:
    statement, library = _load_statement(args)
    doc = _load_json(args.submission_file)
    try:
        submission = submission_from_doc(doc, statement.flow)
        report = correct_submission(submission, statement, library)
    except PayloadMismatch as err:
        print(f"payload mismatch: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except (KeyError, ValueError) as err:
        print(f"malformed submission document: {err!r}", file=sys.stderr)
        return EXIT_INPUT
    print(report_to_json(report))
    return EXIT_OK


def cmd_export_analytics(args) -> int:
    store = Store(args.data_dir)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    events = [
        InteractionEvent(d["student-id"], parse_instant(d["at"]))
        for d in store.state.interactions
    ]
    if events:
        first = min(e.at for e in events).date()
        last = max(e.at for e in events).date()
        counts = daily_sessions(events, first, last)
    else:
        counts = {date.today(): 0}
    (out / "daily_sessions.csv").write_text(daily_sessions_csv(counts), encoding="utf-8")

    entries = [
        (e["doc"]["student-id"], e["doc"]["statement-id"], Mode(e["mode"]))
        for e in store.state.submissions.values()
    ]
    matrix = participation_patterns(entries)
    (out / "participation_patterns.csv").write_text(
        participation_csv(matrix), encoding="utf-8"
    )

    statements = [
        statement_from_doc(versions[-1]) for versions in store.state.statements.values()
    ]
    ledgers = {sid: ledger_from_doc(doc) for sid, doc in store.state.ledgers.items()}
    reports = [
        (store.state.submissions[sub_id]["doc"]["student-id"], store.state.reports[sub_id])
        for sub_id in store.state.reports
    ]
    for student in sorted(ledgers):
        summary = progress_summary(student, ledgers, statements, reports, events)
        (out / f"progress_{student}.json").write_text(
            progress_json(summary), encoding="utf-8"
        )
    print(f"wrote analytics tables to {out}")
    return EXIT_OK


def _student_ledger(store: Store, student: str):
    doc = store.state.ledgers.get(student)
    return ledger_from_doc(doc) if doc else new_ledger(student)


def cmd_mark(args) -> int:
    store = Store(args.data_dir)
    statement_doc = store.state.latest_statement(args.challenge)
    if statement_doc is None:
        print(f"unknown statement {args.challenge!r}", file=sys.stderr)
        return EXIT_DOMAIN
    mark = challenge_mark(_student_ledger(store, args.student), statement_from_doc(statement_doc))
    if mark.kind == "graded":
        print(f"{args.student} {args.challenge}: {mark.fraction} ({float(mark.fraction):.2f})")
    else:
        print(f"{args.student} {args.challenge}: {mark.kind}")
    return EXIT_OK


def cmd_pca_mark(args) -> int:
    store = Store(args.data_dir)
    statements = [
        statement_from_doc(versions[-1]) for versions in store.state.statements.values()
    ]
    if not statements:
        print("no statements in the store", file=sys.stderr)
        return EXIT_DOMAIN
    earned, attainable = course_pca_mark(_student_ledger(store, args.student), statements)
    print(f"{args.student}: {float(earned):.2f}% of {float(attainable):.2f}% attainable")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gligrade", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("seed", help="publish the shipped fixture statements")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--fixtures", action="store_true", help="accepted for explicitness")
    p.set_defaults(func=cmd_seed)

    p = sub.add_parser("grade", help="grade one submission file offline")
    p.add_argument("--statement", required=True)
    p.add_argument("--submission-file", required=True)
    p.add_argument("--data-dir")
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("export-analytics", help="write the analytics tables")
    p.add_argument("--out", required=True)
    p.add_argument("--data-dir", required=True)
    p.set_defaults(func=cmd_export_analytics)

    p = sub.add_parser("mark", help="one student's mark on one challenge")
    p.add_argument("--student", required=True)
    p.add_argument("--challenge", required=True)
    p.add_argument("--data-dir", required=True)
    p.set_defaults(func=cmd_mark)

    p = sub.add_parser("pca-mark", help="one student's aggregated course mark")
    p.add_argument("--student", required=True)
    p.add_argument("--data-dir", required=True)
    p.set_defaults(func=cmd_pca_mark)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except UnknownStudent as err:
        print(f"unknown student {err.student_id!r}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as err:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
