import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "swapforge",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    "stress",
    deadline=None,
    max_examples=300,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "swapforge"))

SEED = 20260810


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def rng_from(seed: int) -> np.random.Generator:
    """Generator for hypothesis-driven randomized properties."""
    return np.random.default_rng(seed)
