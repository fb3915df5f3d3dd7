import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "fewcoin",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fewcoin")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
