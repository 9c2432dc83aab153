from __future__ import annotations

import pytest

from steenrod_ext.modules import builtin
from steenrod_ext.resolution import minimal_resolution
from steenrod_ext.steenrod import get_slice


@pytest.fixture(scope="session")
def a1():
    return get_slice("A1")


@pytest.fixture(scope="session")
def a2():
    return get_slice("A2")


@pytest.fixture(scope="session")
def res_f2_a1(a1):
    return minimal_resolution(builtin("F2", a1), 12, 30)


@pytest.fixture(scope="session")
def res_f2_a2(a2):
    return minimal_resolution(builtin("F2", a2), 10, 30)


@pytest.fixture(scope="session")
def res_f2_full():
    return minimal_resolution(builtin("F2", get_slice("A", 24)), 8, 24)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT

    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
