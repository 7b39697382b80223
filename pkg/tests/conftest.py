import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from geoent import from_uv

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

W_PMAX = 4.0 / 9.0
INV_SQRT3 = 1.0 / math.sqrt(3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_states(rng, n, gamma=0.0, margin=1e-3):
    """States uniform in the (u, v) chart, kept off the chart edges."""
    lo, hi = margin, math.pi / 2 - margin
    uv = rng.uniform(lo, hi, size=(n, 2))
    return [from_uv((u, v), gamma) for u, v in uv]
