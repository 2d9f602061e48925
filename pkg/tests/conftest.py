import pytest

from oracles import FixtureTree

# acceptance verdicts, printed once at the end of the session
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def fixture_tree():
    return FixtureTree()


@pytest.fixture
def verdict():
    def record(number: int, name: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number} [{name}]: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
