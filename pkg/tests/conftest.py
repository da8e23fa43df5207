import pytest

from acceptance_log import RESULTS


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])


@pytest.fixture
def record():
    def _record(number, ok, detail):
        RESULTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(RESULTS[number])
    return _record
