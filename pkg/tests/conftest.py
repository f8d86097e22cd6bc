import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

SEED = 20261019


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


# acceptance outcomes, printed once at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for name in sorted(ACCEPTANCE, key=lambda k: int(k.split("-")[1])):
            terminalreporter.write_line(ACCEPTANCE[name])
