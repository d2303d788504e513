import random

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(20240601)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_line():
    """Record one PASS/FAIL line for the acceptance summary."""

    def record(tag: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {tag}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
