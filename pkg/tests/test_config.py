"""
Tests for tolerance and run configuration
tests/test_config.py
"""

import numpy as np
import pytest

import hwm
from src.modules.config.hwm_config import (
    DEFAULT_TOLERANCES, RunConfig, ToleranceConfig, create_config_from_args, get_run_config,
    get_tolerance_config,
)


def test_default_tolerances():
    assert DEFAULT_TOLERANCES.null_tol == 1e-10
    assert DEFAULT_TOLERANCES.condition_threshold == 1e10
    assert DEFAULT_TOLERANCES.branch_tol == 1e-12


@pytest.mark.parametrize("overrides", [{"null_tol": 0.0}, {"spin_floor": -1.0}, {"condition_threshold": 0.5}])
def test_tolerance_validation(overrides):
    with pytest.raises(ValueError):
        ToleranceConfig(**overrides)


def test_tolerance_overrides():
    tol = get_tolerance_config(null_tol=1e-8, real_tol=None)
    assert tol.null_tol == 1e-8
    assert tol.real_tol == DEFAULT_TOLERANCES.real_tol
    with pytest.raises(ValueError):
        get_tolerance_config(unknown_tol=1.0)


@pytest.mark.parametrize("kwargs", [
    {"command": "plot"},
    {"nt": 0},
    {"t0": 2.0, "t1": 1.0},
    {"xmin": 1.0, "xmax": 1.0},
    {"h": 0.0},
    {"workers": 0},
    {"kmax": 0},
    {"velocity": 1.0},
])
def test_run_config_validation(kwargs):
    with pytest.raises(ValueError):
        RunConfig(**kwargs)


def test_run_config_grids():
    config = get_run_config("evolve", t1=2.0, nt=5, xmin=-1.0, xmax=1.0, nx=3, residual_tol=1e-9)
    assert np.allclose(config.time_grid(), [0.0, 0.5, 1.0, 1.5, 2.0])
    assert np.allclose(config.space_grid(), [-1.0, 0.0, 1.0])
    assert config.tolerances.residual_tol == 1e-9
    assert config.to_dict()["tolerances"]["residual_tol"] == 1e-9


def test_config_from_arguments():
    args = hwm.parse_arguments(["evolve", "datum.json", "--tol", "1e-7", "--nx", "17", "--workers", "3"])
    config = create_config_from_args(args)
    assert config.command == "evolve"
    assert config.input_path == "datum.json"
    assert config.nx == 17 and config.workers == 3
    for name in ("null_tol", "trace_tol", "residual_tol"):
        assert getattr(config.tolerances, name) == 1e-7
    assert config.tolerances.spin_floor == DEFAULT_TOLERANCES.spin_floor

    default = create_config_from_args(hwm.parse_arguments(["validate", "datum.json"]))
    assert default.tolerances == DEFAULT_TOLERANCES


def test_environment_reports_all_components():
    import src.modules as modules

    status = modules.check_environment()
    assert status["all_available"], status["components"]
    info = modules.get_version_info()
    assert "oracle-compare" in info["commands"]
    assert "generate_multi_soliton" in modules.__all__
