import pytest

from gcurves.self_involute_solver import build_self_involute


@pytest.fixture(scope="session")
def pipeline():
    """The default self-involute build (expensive; computed once)."""
    return build_self_involute()


@pytest.fixture(scope="session")
def a_star():
    from gcurves.self_involute_solver import solve_fundamental_a

    return solve_fundamental_a()
