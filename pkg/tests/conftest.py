import os

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(int(os.environ.get("SPECDIAG_SEED", "0")))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None:
        return
    lines = mod.summarize()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
