from __future__ import annotations

import numpy as np
import pytest

from agedpop import (
    MarkedConfiguration,
    Theta,
    constant_rate,
    linear_habitat,
    separable_rate,
    uniform_habitat,
)


@pytest.fixture(scope="session")
def habitat_1d():
    return uniform_habitat([(0.0, 1.0)], 2.0)


@pytest.fixture(scope="session")
def habitat_1d_linear():
    return linear_habitat([(0.0, 1.0)], 1.0, 2.0)


@pytest.fixture(scope="session")
def habitat_2d():
    return uniform_habitat([(0.0, 1.0), (0.0, 2.0)], 3.0)


@pytest.fixture(scope="session")
def const_model():
    return constant_rate(1.0)


@pytest.fixture(scope="session")
def separable_model(habitat_1d):
    return separable_rate(habitat_1d, 0.5, 1.0, 2.0)


@pytest.fixture(scope="session")
def theta_two(habitat_1d):
    return Theta([(1, 1, 1), (2, 1, 2)], habitat_1d)


@pytest.fixture(scope="session")
def theta_one(habitat_1d):
    return Theta([(1, 2, 1)], habitat_1d)


def random_configuration(rng, habitat, max_particles=5, age_scale=1.0):
    k = int(rng.integers(0, max_particles + 1))
    pos = habitat.lower + rng.random((k, habitat.dim)) * (habitat.upper - habitat.lower)
    ages = rng.exponential(age_scale, k)
    return MarkedConfiguration(pos, ages)


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)
