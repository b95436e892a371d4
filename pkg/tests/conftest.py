import numpy as np
import pytest
from hypothesis import settings

from gemd.ldim import population_autocovariance
from gemd.models import example2_network

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

EX2_UNDIRECTED = {(1, 2), (2, 3), (2, 4), (3, 4), (4, 5), (4, 6)}
EX2_ORIENTED = {(1, 2), (2, 3), (2, 4), (3, 4), (6, 4), (4, 5)}


@pytest.fixture(scope="session")
def ex2_model():
    return example2_network(0.4)


@pytest.fixture(scope="session")
def ex2_source(ex2_model):
    return population_autocovariance(ex2_model, 10)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
