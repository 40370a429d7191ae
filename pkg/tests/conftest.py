"""Shared fixtures: tolerances and seeded generators."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from numeric.tolerances import DEFAULT_TOLERANCES, get_tolerances  # noqa: E402


@pytest.fixture
def cfg():
    return DEFAULT_TOLERANCES


@pytest.fixture
def strict_cfg():
    return get_tolerances("strict")


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240601))


@pytest.fixture
def scenarios_dir():
    return os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "scenarios")
