"""Shared pytest wiring: one visible PASS/FAIL line per acceptance criterion."""

import pytest

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _acceptance_results.append((name, report.outcome.upper()))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in sorted(_acceptance_results):
        terminalreporter.write_line(f"{name}: {outcome}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240810)
