import pytest

from rrtower.field import make_field_ctx

# filled by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=[3, 5, 7])
def ctx(request):
    return make_field_ctx(request.param)


@pytest.fixture
def ctx3():
    return make_field_ctx(3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
