import pytest

# one "[criterion N] PASS/FAIL" line per acceptance test, echoed after the
# run so the verdicts are visible even when pytest captures stdout
_acceptance_lines: list[str] = []


@pytest.fixture
def record_criterion():
    def _record(number: int, passed: bool) -> str:
        line = f"[criterion {number}] {'PASS' if passed else 'FAIL'}"
        _acceptance_lines.append(line)
        print(line)
        return line

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
