import numpy as np
import pytest

from conekit import Cone, Scalarizer

ACCEPTANCE_LINES: list[str] = []


def random_halfspace(rng, m=4, n=3):
    """m random rows with A @ 1 > 0 and full column rank (a pointed cone)."""
    while True:
        A = rng.standard_normal((m, n)) + 0.8
        if np.all(A @ np.ones(n) > 0.05) and np.linalg.matrix_rank(A) == n:
            return A


def acceptance_cones():
    return {
        "orthant2": Cone.orthant(2),
        "orthant5": Cone.orthant(5),
        "halfspace4": Cone.halfspace(random_halfspace(np.random.default_rng(2024))),
        "lorentz3": Cone.lorentz(3),
    }


@pytest.fixture(params=list(acceptance_cones()))
def cone(request):
    return acceptance_cones()[request.param]


@pytest.fixture
def scalarizer(cone):
    return Scalarizer(cone)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
