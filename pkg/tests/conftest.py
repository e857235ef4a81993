"""Collects one pass/fail line per acceptance criterion and prints them at the end of the run."""

import pytest

_LINES = {}


class AcceptanceReport:
    def record(self, criterion, ok, detail):
        _LINES[criterion] = (bool(ok), detail)


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceReport()


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_LINES):
        ok, detail = _LINES[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
