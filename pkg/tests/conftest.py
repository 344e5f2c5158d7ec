import numpy as np
import pytest
from hypothesis import settings

from jumpwalk import CoinParams, RunConfig, run_trajectory

# property tests explore the same cases on every run
settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    """Compile the evolution kernel once so timings are not JIT-bound."""
    run_trajectory(RunConfig(q=0.5, coin="K", t_max=4, seed=0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def k_coin():
    return CoinParams(family="K", theta=np.pi / 4)


@pytest.fixture
def h_coin():
    return CoinParams(family="H", theta=np.pi / 4)
