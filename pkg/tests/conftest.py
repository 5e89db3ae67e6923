import math
import os

import pytest

from appell.core import bernoulli, from_roots, polynomial

os.environ.setdefault("APPELL_THREADS", "1")

SQRT2 = math.sqrt(2.0)


def g_set():
    """The generating functions used across the suites."""
    return {
        "one": polynomial([1.0], name="1"),
        "z-1": from_roots([1.0], name="z-1"),
        "z-2i": from_roots([2j], name="z-2i"),
        "cubic": polynomial([-2.0, 2.0, -1.0, 1.0], name="(z-1)(z^2+2)"),
        "bernoulli": bernoulli(),
    }


@pytest.fixture(scope="session")
def gs():
    return g_set()


# acceptance summary lines, filled by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
