import numpy as np
import pytest

from genstereo import kernels
from genstereo.imaging import GrayImage, StereoPair


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    """Run a test once per available kernel backend, as the process default."""
    previous = kernels.default_backend_name()
    kernels.set_default_backend(request.param)
    yield request.param
    kernels.set_default_backend(previous)


def random_pair(rng, h, w):
    return StereoPair(
        GrayImage(rng.integers(0, 256, (h, w))),
        GrayImage(rng.integers(0, 256, (h, w))),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_RESULTS = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(ok, detail)`` then assert ``ok``."""

    def record(ok, detail):
        ACCEPTANCE_RESULTS.append((request.node.name, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
