import math

import pytest

from becbistab import SystemParams, preset


@pytest.fixture(scope="session")
def base():
    return preset("paper-2015")


@pytest.fixture
def unit_params():
    """Normalized parameter set with kappa = 1."""
    return SystemParams(eta=1.0, eta_eff=0.0, kappa=1.0, delta=0.0, omega_m=1.0, omega_r=0.25,
                        xi=1.0, xi_sm=0.0)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


TWO_PI = 2.0 * math.pi


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


@pytest.fixture
def report():
    def record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
