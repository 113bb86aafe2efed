import numpy as np
import pytest

from valgeo.grassmann import SeededSampler


@pytest.fixture
def sampler():
    """Fresh deterministic sampler per test."""
    return SeededSampler(20240817)


@pytest.fixture
def rng():
    return np.random.default_rng(911)
