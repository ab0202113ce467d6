import sys

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_real_state(rng, lam_lo=0.5):
    a = rng.uniform(0.0, np.pi)
    lam = rng.uniform(lam_lo, 1.0)
    c, s = np.cos(a), np.sin(a)
    rot = np.array([[c, -s], [s, c]])
    return rot @ np.diag([lam, 1 - lam]) @ rot.T


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
