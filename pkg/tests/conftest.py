import pytest

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def record():
    """Stores a one-line verdict for an acceptance criterion."""

    def _record(k: int, passed: bool, detail: str) -> bool:
        _CRITERIA[k] = f"{'PASS' if passed else 'FAIL'} criterion {k}: {detail}"
        print(_CRITERIA[k])
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[k])
