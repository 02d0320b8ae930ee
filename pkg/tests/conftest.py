import numpy as np
import pytest

from hdiscord.config import OptimizerConfig, SymmetricScanConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def optimizer_config():
    return OptimizerConfig(workers=1, seed=0)


@pytest.fixture
def coarse_scan():
    """Symmetric scan fine enough for Dicke-basis checks, cheap enough for N = 20"""
    return SymmetricScanConfig(theta_points=61, phi_points=12, restarts=3)
