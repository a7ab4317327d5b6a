import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def blobs(centers, n_per, sigma, seed=0):
    """Labelled Gaussian blobs, one class per center, interleaved."""
    r = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    y = np.tile(np.arange(len(centers)), n_per)
    X = centers[y] + sigma * r.standard_normal((len(y), centers.shape[1]))
    return X, y


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
