import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


class FixedStream:
    """Feeds a scripted sequence of uniforms to ``step``."""

    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


@pytest.fixture
def fixed_stream():
    return FixedStream


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with (label, passed, detail)."""
    def record(label, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def _richardson_fd(query, h):
    """Central difference at query.x with the h**q kink bias extrapolated away.

    The odd |z - x|**(q + 1) part of the objective leaves a c * h**q term in a
    plain central difference; combining steps h and h/2 cancels it.
    """
    from arcwalk.lq import lq_objective

    x = query.x

    def central(step):
        return (lq_objective(query, x + step) - lq_objective(query, x - step)) / (2 * step)

    r = 2.0 ** query.q
    return (r * central(h / 2) - central(h)) / (r - 1)


@pytest.fixture
def richardson_fd():
    return _richardson_fd
