"""Shared fixtures: the large certified table and the acceptance report.

The acceptance tests record one line per criterion; the terminal summary
hook prints them after the run so the pass/fail ledger is always visible.
"""

import time
from fractions import Fraction

import pytest

from ballmodes.besselpoly import gamma_param
from ballmodes.spectrum import spectrum_table

_ACCEPTANCE_LINES = {}


class AcceptanceLog:
    """Collects one pass/fail line per acceptance criterion."""

    def record(self, number: int, ok: bool, detail: str) -> None:
        verdict = "PASS" if ok else "FAIL"
        _ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {verdict} - {detail}"


@pytest.fixture(scope="session")
def acceptance_log():
    return AcceptanceLog()


@pytest.fixture(scope="session")
def big_table_timed():
    """gamma = 2 table for n <= 800 at 1e-30 width, with its build time."""
    gp = gamma_param("2")
    start = time.perf_counter()
    table = spectrum_table(gp, 800, Fraction(1, 10**30), threads=2)
    return table, time.perf_counter() - start


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(_ACCEPTANCE_LINES[number])
