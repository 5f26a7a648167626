import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lfmdfn.core.lightfield import LightField4D


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def coded_lf(u=2, v=2, x=2, y=2):
    """LF with value 1000u + 100v + 10x + y (index arithmetic checks)."""
    uu, vv, xx, yy = np.meshgrid(
        np.arange(u), np.arange(v), np.arange(x), np.arange(y), indexing="ij"
    )
    return LightField4D((1000 * uu + 100 * vv + 10 * xx + yy).astype(np.float64)[..., None])


@pytest.fixture
def lf_cache(tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    monkeypatch.setenv("LFMDFN_CACHE", str(cache))
    return cache


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo one PASS/FAIL line per acceptance criterion after the run."""
    lines = getattr(sys.modules.get("test_acceptance"), "_RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
