from __future__ import annotations

import pytest

ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def acceptance_record(request):
    """Callable storing (criterion number, ok, detail) for the terminal summary."""
    results = request.config.stash[ACCEPTANCE]

    def record(number: int, ok: bool, detail: str = "") -> None:
        results[number] = (ok, detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
