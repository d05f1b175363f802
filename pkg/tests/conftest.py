import os
import sys

import numpy as np
import pytest

# Add repository root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from series_core import TaylorPoly  # noqa: E402
from spaces import WeightedCoefficientSpace, WeightSequence  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def hardy():
    return WeightedCoefficientSpace.hardy(64)


@pytest.fixture
def weighted_linear():
    """alpha_n = n + 1, p = 2."""
    return WeightedCoefficientSpace(WeightSequence.from_exponent(1.0, 64), p=2.0)


@pytest.fixture
def half_geometric():
    """sum_{k<=20} z^k / 2^k."""
    return TaylorPoly(0.5 ** np.arange(21))
