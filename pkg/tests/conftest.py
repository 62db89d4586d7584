import pathlib

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import frfband as fb

settings.register_profile(
    "default",
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid():
    return fb.make_frequency_grid(fb.DEFAULT_FREQS)


@pytest.fixture(scope="session")
def tg(grid):
    return fb.make_time_grid(grid)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def golden_dir():
    return pathlib.Path(__file__).parent / "golden"
