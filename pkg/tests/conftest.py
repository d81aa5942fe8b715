from __future__ import annotations

import time
from fractions import Fraction

import pytest

from morsecube import cubecomplex, polytope, search

# criterion number -> (passed, detail); filled by the acceptance suite
ACCEPTANCE = {}


def record(number, passed, detail):
    ACCEPTANCE[number] = (passed, detail)


@pytest.fixture(scope="session")
def p4():
    return polytope.load_bundled("p4")


@pytest.fixture(scope="session")
def cell24():
    return polytope.load_bundled("cell24")


@pytest.fixture(scope="session")
def cell120():
    return polytope.load_bundled("cell120")


@pytest.fixture(scope="session")
def cube3():
    return polytope.generate_hypercube(3)


@pytest.fixture(scope="session")
def complex_w(p4):
    return cubecomplex.build_cube_complex(*p4)


@pytest.fixture(scope="session")
def complex_x(cell24):
    return cubecomplex.build_cube_complex(*cell24)


@pytest.fixture(scope="session")
def group24(cell24):
    return search.automorphisms(*cell24)


@pytest.fixture(scope="session")
def symmetric_state():
    """The ±1 state from left multiplication by i, scaled to ±1/2."""
    return search.quaternion_orbit_state().scaled(Fraction(1, 2))


@pytest.fixture(scope="session")
def census24(cell24):
    start = time.perf_counter()
    census = search.enumerate_states(*cell24, search.ALL_CIRCLES)
    return census, time.perf_counter() - start


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE, key=lambda k: (int(str(k).split(".")[0]), str(k))):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}")
