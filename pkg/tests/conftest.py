import math

import numpy as np
import pytest

from sgreg import BasisConfig, Discretization, ProblemSpec


@pytest.fixture
def cfg():
    return BasisConfig(b=math.pi, n_modes=32, n_quad=128)


@pytest.fixture
def disc(cfg):
    return Discretization(cfg, n_x=101)


@pytest.fixture
def nonlinear_constants():
    return ProblemSpec(
        a=1.0, b=math.pi, alpha1=1.0, alpha2=1.0, gamma1=1.0, gamma2=1.0,
        delta=[[1.0, 0.5], [0.5, 1.0]],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
