"""Registry for acceptance-criterion verdicts.

Each acceptance test records its verdict here before asserting, so the
terminal summary can print one PASS/FAIL line per criterion even when an
assertion fails.  conftest.py owns the printing.
"""

from __future__ import annotations

RESULTS: dict[int, tuple[bool, str]] = {}


def record(number: int, passed: bool, detail: str) -> bool:
    """Store a verdict; returns `passed` so callers can assert the result."""
    RESULTS[number] = (bool(passed), detail)
    return bool(passed)


def summary_lines() -> list[str]:
    lines = []
    for number in sorted(RESULTS):
        passed, detail = RESULTS[number]
        verdict = "PASS" if passed else "FAIL"
        lines.append(f"CRITERION {number}: {verdict} - {detail}")
    return lines
