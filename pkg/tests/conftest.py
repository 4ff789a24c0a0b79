import pytest

from fadingrelay.scenarios import builtin_scenario


@pytest.fixture(scope="session")
def top():
    return builtin_scenario("fig2-top")


@pytest.fixture(scope="session")
def bottom():
    return builtin_scenario("fig2-bottom")
