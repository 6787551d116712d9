import pytest

_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert."""

    def record(number: int, checks: dict[str, bool], detail: str) -> None:
        ok = all(checks.values())
        failed = [name for name, passed in checks.items() if not passed]
        status = "PASS" if ok else "FAIL (" + ", ".join(failed) + ")"
        _LINES[number] = f"criterion {number}: {status} | {detail}"
        print(_LINES[number])
        assert ok, _LINES[number]

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_LINES):
        terminalreporter.write_line(_LINES[number])
