import itertools

import numpy as np
import pytest

from pec import _backend


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=_backend.available())
def backend(request):
    return request.param


def all_schedules(max_blocks=3, max_k=3):
    """Every schedule with up to ``max_blocks`` blocks of 1..``max_k`` steps."""
    out = []
    for T in range(1, max_blocks + 1):
        out.extend(itertools.product(range(1, max_k + 1), repeat=T))
    return out


def scalar_correct(y, c, K, under=True):
    """Plain-float reference of the full schedule, one value at a time."""
    s = 1.0 if under else -1.0
    g = y + s * c * y * (1.0 - y)
    x = g
    for Kt in K:
        for _ in range(Kt):
            x = g + s * c * x * (1.0 - x)
        g = x
    return x


# -- acceptance reporting --------------------------------------------------------

ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for the acceptance summary and return the verdict."""

    def record(number, title, ok, detail=""):
        ACCEPTANCE_LINES.append((number, title, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda r: (r[0], r[1])):
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
