import pytest

_RESULTS = {}


@pytest.fixture
def criterion():
    """Record one acceptance criterion; call as ``criterion(n, name, ok, detail)``."""

    def record(n, name, ok, detail=""):
        _RESULTS[n] = (name, bool(ok), detail)
        print(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {name} {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        name, ok, detail = _RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {name} {detail}".rstrip())
