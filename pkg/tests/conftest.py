import sys

import pytest

from spiralmin import (
    ProfileParams, build, integrate_profile, legendrian_circle, legendrian_torus, steady_profile,
)


@pytest.fixture(scope="session")
def circle():
    return legendrian_circle()


@pytest.fixture(scope="session")
def torus():
    return legendrian_torus()


@pytest.fixture(scope="session")
def curve_minus():
    return integrate_profile(ProfileParams.auto(1, 1, -1, 1.5), n_joints=2)


@pytest.fixture(scope="session")
def curve_plus():
    return integrate_profile(ProfileParams.auto(1, 1, 1, 1.5), n_joints=2)


@pytest.fixture(scope="session")
def prod_minus(circle, curve_minus):
    return build(circle, circle, curve_minus)


@pytest.fixture(scope="session")
def prod_plus(circle, curve_plus):
    return build(circle, circle, curve_plus)


@pytest.fixture(scope="session")
def prod_circle_torus(circle, torus):
    curve = integrate_profile(ProfileParams.auto(1, 2, -1, 1.5), n_joints=2)
    return build(circle, torus, curve)


@pytest.fixture(scope="session")
def prod_steady(circle):
    return build(circle, circle, steady_profile(1, 1, -1))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
