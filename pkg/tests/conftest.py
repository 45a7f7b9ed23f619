import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_LINES = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line and fail the test if the check did not pass."""
    lines = request.config.stash.setdefault(_LINES, [])

    def record(number: int, ok: bool, what: str, measured: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {what}; measured {measured}"
        print(line)
        lines.append((number, line))
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
