import sys
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

STUB = Path(__file__).parent / "stubs" / "builtin_blackbox.py"


@pytest.fixture
def stub_command():
    def make(problem: str, mode: str = "ok") -> str:
        return f"{sys.executable} {STUB} {problem} {mode}"
    return make


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
