"""Shared pytest plumbing.

The acceptance tests register a one-line verdict per criterion; the hook
below replays those lines at the end of the run so the pass/fail ledger
is visible in plain ``pytest`` output without ``-s``.
"""

from __future__ import annotations

_CRITERION_LINES: list[str] = []


def record_criterion(tag: str, ok: bool, detail: str = "") -> None:
    line = f"[acceptance] {tag}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f" -- {detail}"
    _CRITERION_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _CRITERION_LINES:
        terminalreporter.write_line(line)
