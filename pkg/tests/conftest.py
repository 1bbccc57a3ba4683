import pytest

from renyirobust import samplers

_REPORT: list[tuple[str, bool, str]] = []


@pytest.fixture
def report():
    """Record one pass/fail line for the acceptance summary."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        _REPORT.append((name, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    return record


@pytest.fixture
def fresh_cache():
    samplers._cached_draws.cache_clear()
    yield
    samplers._cached_draws.cache_clear()


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _REPORT:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
