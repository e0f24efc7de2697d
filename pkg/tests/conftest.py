import pytest

from kinmarket.core import Constant, ExponentialDecay

ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line; lines are echoed in the terminal summary."""

    def _report(criterion, passed, detail):
        ACCEPTANCE_LINES.append(f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def test2_curve():
    return ExponentialDecay.anchored(0.2, 50.0, 0.5)


@pytest.fixture
def half():
    return Constant(0.5)
