"""Shared pytest wiring: the acceptance suite's per-criterion summary."""

ACCEPTANCE_RESULTS: list[tuple[int, str, str]] = []


def record_criterion(number: int, verdict: str, description: str) -> None:
    ACCEPTANCE_RESULTS.append((number, verdict, description))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, description in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(
            f"criterion {number}: {verdict} - {description}")
