import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from telesim.qmath import PureQubit

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def random_qubit(rng: np.random.Generator) -> PureQubit:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return PureQubit(v[0], v[1])


def random_real_qubit(rng: np.random.Generator) -> PureQubit:
    t = rng.uniform(0.0, np.pi)
    return PureQubit(np.cos(t), np.sin(t))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
