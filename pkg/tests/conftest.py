import numpy as np
import pytest

from ioncool import ChainConfig, chain_modes


@pytest.fixture(scope="session")
def spec2():
    return chain_modes(ChainConfig(2))


@pytest.fixture(scope="session")
def spec3():
    return chain_modes(ChainConfig(3))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
