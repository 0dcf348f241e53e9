import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("stress", deadline=None, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_poly(rng, N, mean_free=False):
    from eit_mimic import TrigCoeffs

    c = rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)
    return TrigCoeffs(c, mean_free=mean_free)
