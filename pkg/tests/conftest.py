"""Shared fixtures for the coadj_utils test suite."""

import numpy as np
import pytest

from coadj_utils import ToolkitConfig
from coadj_utils.circlefield import CircleField, random_diffeo, random_field


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long ODE sweeps and full acceptance suites")


@pytest.fixture
def rng():
    """Seeded generator so property sweeps are reproducible."""
    return np.random.default_rng(1234)


@pytest.fixture
def cfg():
    """Default configuration."""
    return ToolkitConfig()


@pytest.fixture
def small_cfg():
    """Lower bandlimit for the slower spectral tests."""
    return ToolkitConfig(bandlimit=32)


@pytest.fixture
def smooth_field(rng):
    """A random band-limited real field."""
    return random_field(rng, bandlimit=4, amplitude=0.5)


@pytest.fixture
def smooth_diffeo(rng):
    """A random diffeo with bounded displacement slope."""
    return random_diffeo(rng, bandlimit=3, max_slope=0.4)


@pytest.fixture
def cos_field():
    """cos(theta)."""
    return CircleField.cos(1)
