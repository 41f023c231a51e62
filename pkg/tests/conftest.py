import numpy as np
import pytest

from qfopt import AR1, MbbConfig, SimConfig
from qfopt.mbb import keyed_rng
from qfopt.simlab import simulate_sample


def make_sample(P=120, b_tilde=0.6, H=4, levels=(0.25, 0.5, 0.75), seed=1, with_z=False,
                swap=False):
    cfg = SimConfig(AR1(0.6, b_tilde), P, H, levels, MbbConfig(4, 1, 0), 100, swap_horizons=swap)
    return simulate_sample(cfg, keyed_rng(seed, 99), with_z=with_z)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ar_sample():
    return make_sample()


@pytest.fixture
def aug_sample():
    return make_sample(with_z=True)


@pytest.fixture
def small_cfg():
    return MbbConfig(block_length=4, draws=49, seed=7)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is not None and module.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(module.LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
