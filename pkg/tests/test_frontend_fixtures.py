"""The JSON fixtures shipped to the web client must stay in sync with the
canonical encodings the server produces."""

from pathlib import Path

from gligrade import fixtures
from gligrade.model import canonical_json, filled_gli_to_doc, statement_to_doc

FIXTURES = Path(__file__).resolve().parent.parent / "frontend" / "test" / "fixtures"


def test_golden_gli_fixture_in_sync():
    expected = canonical_json(filled_gli_to_doc(fixtures.golden_gli()))
    assert (FIXTURES / "golden-gli.json").read_text(encoding="utf-8") == expected


def test_golden_statement_fixture_in_sync():
    expected = canonical_json(statement_to_doc(fixtures.golden_statement()))
    assert (FIXTURES / "golden-statement.json").read_text(encoding="utf-8") == expected
