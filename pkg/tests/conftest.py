import numpy as np
import pytest
from hypothesis import settings

from qcurv.profiles import (cylinder_profile, flat_profile, round_sphere_profile,
                            w_a_profile)

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def flat():
    return flat_profile()


@pytest.fixture(scope="session")
def sphere():
    return round_sphere_profile()


@pytest.fixture(scope="session")
def cylinder():
    return cylinder_profile()


@pytest.fixture(scope="session")
def w_minus_one():
    return w_a_profile(-1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
