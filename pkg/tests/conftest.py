import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from netclass import kernels  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=kernels.BACKENDS)
def backend(request):
    """Run a test once per kernel backend."""
    with kernels.use_backend(request.param):
        yield request.param


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
