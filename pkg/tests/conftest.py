import pytest

_LINES = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_LINES] = {}


@pytest.fixture(scope="session")
def criterion_log(pytestconfig):
    """Record one summary line per acceptance criterion.

    Call as ``criterion_log(number, passed, text)``; the lines are printed
    at the end of the session in criterion order.
    """
    lines = pytestconfig.stash[_LINES]

    def record(number, passed, text):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {text}"
        lines.setdefault(number, []).append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        for line in lines[number]:
            terminalreporter.write_line(line)
