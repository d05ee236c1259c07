"""Shared fixtures, including the acceptance-criteria recorder.

Acceptance tests register one line per criterion; the summary hook prints
them at the end of the run so every criterion shows a visible PASS/FAIL.
"""

import pytest

_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_criterion():
    """Return a callback that records (criterion, passed, detail) lines."""

    def _record(name: str, passed: bool, detail: str = "") -> None:
        _RESULTS.append((name, passed, detail))

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, passed, detail in _RESULTS:
        status = "PASS" if passed else "FAIL"
        suffix = f"  [{detail}]" if detail else ""
        terminalreporter.write_line(f"{status}  {name}{suffix}")
