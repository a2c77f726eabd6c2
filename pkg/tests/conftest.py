"""
Shared fixtures for the Half-Wave Maps test suite
tests/conftest.py
"""

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from src.modules.datasets.rational_data import RationalData  # noqa: E402
from src.modules.dynamics.constraints import single_soliton  # noqa: E402
from src.modules.datasets.generators import generate_multi_soliton  # noqa: E402

DATA_DIR = ROOT / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def static_soliton() -> RationalData:
    """m0 = e3, x1 = i, s1 = (1, 0, i)."""
    return RationalData(np.array([0.0, 0.0, 1.0]), np.array([1j]), np.array([[1.0, 0.0, 1j]]))


@pytest.fixture
def traveling_soliton() -> RationalData:
    return single_soliton(-2.0 + 1.5j, velocity=0.6, phase=0.4)


@pytest.fixture(scope="session")
def two_soliton() -> RationalData:
    return generate_multi_soliton(2, seed=0)


@pytest.fixture(scope="session")
def two_soliton_set():
    return [generate_multi_soliton(2, seed=seed) for seed in (0, 1, 2)]


@pytest.fixture(scope="session")
def static_soliton_path() -> Path:
    return DATA_DIR / "static_soliton.json"
