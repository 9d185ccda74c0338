"""
Shared test fixtures and configuration for cachecost tests.
"""

import numpy as np
import pytest

from cachecost.config import Config
from cachecost.model import make_config


@pytest.fixture
def rng():
    """Seeded generator for random property checks."""
    return np.random.default_rng(20240611)


@pytest.fixture
def two_type_config():
    """K=5, N=10, rho=0.1, alpha=1: ArchitectureLimited with the (1, 2) intersection optimal."""
    return make_config(5, 10, 0.1, 1.0)


@pytest.fixture
def cost_limited_config():
    """K=5, N=10, rho=0.3, alpha=0.9: only the cost constraint binds."""
    return make_config(5, 10, 0.3, 0.9)


@pytest.fixture
def free_config():
    """K=5, N=10, rho=0: placement is free."""
    return make_config(5, 10, 0.0, 0.5)


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Point the dataset output directory at a temporary path."""
    monkeypatch.setattr(Config, "OUTPUT_DIR", str(tmp_path))
    return tmp_path
