import numpy as np
import pytest

from rilab import build_sphere
from rilab.geometry import build_warped, dumbbell_profile


@pytest.fixture(scope="session")
def unit_s3():
    return build_sphere(3, 1.0, m=512, k=64)


@pytest.fixture(scope="session")
def s3_small():
    return build_sphere(3, 1.0, m=256, k=32)


@pytest.fixture(scope="session")
def dumbbell():
    return build_warped(dumbbell_profile(3, neck=0.3, m=512), k=16)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
