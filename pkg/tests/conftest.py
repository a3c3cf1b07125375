import numpy as np
import pytest
from hypothesis import settings

from chaoscope import gallery
from chaoscope.hutchinson import deterministic_attractor
from chaoscope.sets import PointCloud

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(scope="session")
def sierpinski():
    return gallery.build("sierpinski").system


@pytest.fixture(scope="session")
def sierpinski_oracle(sierpinski):
    S0 = PointCloud(sierpinski.space, np.array([[0.0, 0.0]]))
    cloud, report = deterministic_attractor(sierpinski, S0, 2.0**-9, 2.0**-8, 60)
    assert report.converged
    return cloud


@pytest.fixture(scope="session")
def sierpinski_oracle_coarse(sierpinski):
    S0 = PointCloud(sierpinski.space, np.array([[0.0, 0.0]]))
    cloud, report = deterministic_attractor(sierpinski, S0, 2.0**-6, 2.0**-5, 60)
    assert report.converged
    return cloud


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
