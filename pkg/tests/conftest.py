import sys

import numpy as np
import pytest

from swarm_isac.config import baseline_scenario
from swarm_isac.geometry import build_layout


@pytest.fixture
def baseline():
    s = baseline_scenario()
    return s, build_layout(s)


@pytest.fixture
def small():
    """A quick M=8, N=4 instance with short distances."""
    s = baseline_scenario(M=8, N=4, l_AD_m=60.0, l_A1_m=30.0, d_m=5.0, alpha_max_db=20.0)
    return s, build_layout(s)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in results.values():
        terminalreporter.write_line(line)
