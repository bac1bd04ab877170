"""Shared test hooks: a per-criterion summary for the acceptance gate.

Acceptance tests (tests/test_acceptance.py) are named ``test_a<N>_...``.
They may record a one-line detail string through the ``acceptance``
fixture; after the run, one ``A<N>: PASS/FAIL`` line is printed per
criterion so the overall result can be read off the tail of the log.
"""

from __future__ import annotations

import re

import pytest

_DETAILS: dict[str, str] = {}
_NODE_RE = re.compile(r"test_acceptance\.py::test_(a\d+)_")


@pytest.fixture
def acceptance():
    """Recorder: call with (criterion_id, detail_line)."""

    def record(criterion: str, detail: str) -> None:
        _DETAILS[criterion.upper()] = detail

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes: dict[str, str] = {}
    for status, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            match = _NODE_RE.search(getattr(report, "nodeid", ""))
            if not match:
                continue
            crit = match.group(1).upper()
            if verdict == "FAIL" or crit not in outcomes:
                outcomes[crit] = verdict
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(outcomes, key=lambda c: int(c[1:])):
        line = f"{crit}: {outcomes[crit]}"
        detail = _DETAILS.get(crit)
        if detail:
            line += f" — {detail}"
        terminalreporter.write_line(line)
