"""Transport stub serving recorded API responses; counts every call."""

from __future__ import annotations

import json
from pathlib import Path

FIXTURES = Path(__file__).parent / "fixtures" / "wikidata"


class RecordedTransport:
    def __init__(self, responses=None):
        if responses is None:
            responses = json.loads((FIXTURES / "responses.json").read_text(encoding="utf-8"))
        self.responses = responses
        self.calls = []

    def __call__(self, url, params):
        self.calls.append((url, dict(params)))
        for entry in self.responses:
            if all(params.get(k) == v for k, v in entry["request"].items()):
                return entry["status"], json.loads(json.dumps(entry["body"]))
        raise AssertionError(f"unexpected request {params}")


def expected_audit_records():
    lines = (FIXTURES / "audit_expected.jsonl").read_text(encoding="utf-8").splitlines()
    return [json.loads(line) for line in lines if line.strip()]
