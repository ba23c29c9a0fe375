import math

import numpy as np
import pytest

from hybrident.config import reference_params

TWO_PI = 2 * math.pi
MHZ = TWO_PI * 1e6


@pytest.fixture
def fig2_params():
    """Reference table at the fig2c optimum (g_ma = 1.5 MHz, g_b1b2 = 2.4 MHz)."""
    return reference_params()


@pytest.fixture
def fig4_params():
    return reference_params(G_m=1.4e6, G_c=3.2e6)


@pytest.fixture
def rng():
    return np.random.default_rng(20241018)
