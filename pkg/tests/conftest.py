import pytest

_ACCEPTANCE: list[str] = []


@pytest.fixture
def report_criterion():
    """Record one pass/fail line for the acceptance summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        _ACCEPTANCE.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
