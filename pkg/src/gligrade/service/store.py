"""Append-only event journal with snapshot/replay.

Every state change is one JSON line in the journal; replaying the journal
from empty reproduces the in-memory state exactly (that equality is the
persistence test and doubles as the analytics source of truth).  A grading
event carries its report, the updated ledger, and the interaction in a
single line, which is what makes submit atomic.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..model import canonical_json


@dataclass
class State:
    # statement id -> list of versions, each a statement doc
    statements: dict[str, list[dict]] = field(default_factory=dict)
    # submission id -> {"doc": submission doc, "mode": str}
    submissions: dict[str, dict] = field(default_factory=dict)
    # submission id -> feedback report doc
    reports: dict[str, dict] = field(default_factory=dict)
    # student id -> ledger doc
    ledgers: dict[str, dict] = field(default_factory=dict)
    # deduplicated (student-id, at) interaction docs, in journal order
    interactions: list[dict] = field(default_factory=list)
    submission_counter: int = 0

    def latest_statement(self, statement_id: str) -> dict | None:
        versions = self.statements.get(statement_id)
        return versions[-1] if versions else None


def apply_event(state: State, event: dict) -> None:
    kind = event["kind"]
    if kind == "statement":
        doc = event["doc"]
        state.statements.setdefault(doc["id"], []).append(doc)
    elif kind == "submission":
        state.submission_counter += 1
        sub_id = event["id"]
        state.submissions[sub_id] = {"doc": event["doc"], "mode": event["mode"]}
        state.reports[sub_id] = event["report"]
        state.ledgers[event["doc"]["student-id"]] = event["ledger"]
        if event.get("interaction") is not None:
            _add_interaction(state, event["interaction"])
    elif kind == "trump":
        state.ledgers[event["student-id"]] = event["ledger"]
    elif kind == "interaction":
        _add_interaction(state, {"student-id": event["student-id"], "at": event["at"]})
    else:
        raise ValueError(f"unknown journal event kind {kind!r}")


def _add_interaction(state: State, doc: dict) -> None:
    if doc not in state.interactions:
        state.interactions.append(doc)


def snapshot_doc(state: State) -> dict:
    """Canonical, order-stable view of the whole state."""
    return {
        "statements": {
            sid: versions for sid, versions in sorted(state.statements.items())
        },
        "submissions": {
            sub_id: state.submissions[sub_id] for sub_id in sorted(state.submissions)
        },
        "reports": {sub_id: state.reports[sub_id] for sub_id in sorted(state.reports)},
        "ledgers": {sid: state.ledgers[sid] for sid in sorted(state.ledgers)},
        "interactions": state.interactions,
        "submission-counter": state.submission_counter,
    }


class StoreIOError(Exception):
    def __init__(self, detail: str):
        super().__init__(detail)
        self.code = "STORE_IO"


class Store:
    """Journal-backed store. Appends are serialized by the caller (the
    service handles one mutation at a time per student); reads hit the
    in-memory state."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.journal_path = self.data_dir / "journal.jsonl"
        self.snapshot_path = self.data_dir / "snapshot.json"
        try:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        except OSError as err:
            raise StoreIOError(str(err)) from err
        self.state = (
            replay_journal(self.journal_path) if self.journal_path.exists() else State()
        )

    def append(self, event: dict) -> None:
        line = canonical_json(event)
        try:
            with open(self.journal_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as err:
            raise StoreIOError(str(err)) from err
        apply_event(self.state, event)

    def next_submission_id(self) -> str:
        return f"sub-{self.state.submission_counter + 1:06d}"

    def write_snapshot(self) -> str:
        text = canonical_json(snapshot_doc(self.state))
        try:
            self.snapshot_path.write_text(text, encoding="utf-8")
        except OSError as err:
            raise StoreIOError(str(err)) from err
        return text


def replay_journal(journal_path: str | Path) -> State:
    state = State()
    with open(journal_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                apply_event(state, json.loads(line))
    return state
