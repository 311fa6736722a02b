import numpy as np
import pytest

from photonic_sic.channel import PathSet
from photonic_sic.link import LinkConfig, SimulatedLink, make_tx
from photonic_sic.signals import OfdmConfig


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: end-to-end scenarios taking more than a few seconds")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def link_cfg():
    return LinkConfig()


@pytest.fixture(scope="session")
def tx1(link_cfg):
    return make_tx(OfdmConfig(seed=1), link_cfg)


@pytest.fixture(scope="session")
def single_path_link(link_cfg, tx1):
    paths = PathSet.direct_only([4.768e-9], [0.51])
    return SimulatedLink([tx1], paths, link_cfg)


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Collects one status line per acceptance criterion."""
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
