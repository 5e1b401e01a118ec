from __future__ import annotations

import pytest

from stratkit.corpus import load_fixture

# filled by tests/test_acceptance.py: criterion number -> (label, passed, seconds)
ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, float]] = {}


@pytest.fixture(scope="session")
def pasferme():
    return load_fixture("pasferme")


@pytest.fixture(scope="session")
def x_xy():
    return load_fixture("x_xy")


@pytest.fixture(scope="session")
def identity():
    return load_fixture("identity")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_RESULTS):
        label, ok, secs = ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {label}  ({secs:.2f}s)")
