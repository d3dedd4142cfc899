import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def acceptance_report():
    """Record one verdict line per acceptance criterion."""

    def record(label: str, checks: list[tuple[str, bool]]) -> bool:
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{'ok' if passed else 'MISS'} {what}" for what, passed in checks)
        _ACCEPTANCE.append((label, ok, detail))
        print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(_ACCEPTANCE, key=lambda r: int(r[0].split()[1])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
