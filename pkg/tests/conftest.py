import math

import pytest

from corrmem.schedule import constant, storage_ramp
from corrmem.system import cross_line, straight_line


@pytest.fixture
def line2():
    return straight_line([1.0, 0.8], [constant(1.3), constant(0.7)], atoms=[1.0, 1.5])


@pytest.fixture
def cross_generic():
    return cross_line(0.9, 0.7, 0.6, 0.8, [constant(1.1), constant(0.6), constant(1.4)], atoms=[1.0, 2.0, 1.5])


@pytest.fixture
def ramp2():
    T = 10.0
    return straight_line([1.0, 0.8], [storage_ramp(5.0, T), storage_ramp(3.0, T)])


HALF_PI = math.pi / 2


ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(f"{cid}: {'PASS' if ok else 'FAIL'}  {detail}")
