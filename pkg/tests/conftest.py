"""Shared fixtures for the cargo revenue management test suite."""

from pathlib import Path
from typing import Any, Callable, Dict

import pytest
import toml

from src.config.experiment import ExperimentConfig, experiment_from_dict
from src.market import DemandParams, LogNormalSpec

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def standard_params() -> DemandParams:
    """Default ten-day market"""
    return DemandParams.standard()


@pytest.fixture
def flat_params() -> DemandParams:
    """One-day market with constant rate and 100 kg (two-unit) shipments"""
    return DemandParams(
        lambda_by_dp=(0.5,),
        alpha_by_dp=(100.0,),
        dow_factors=(1.0,) * 7,
        seasonality_base=1.0,
        seasonality_amplitude=0.0,
        weight_dist=LogNormalSpec(100.0, 0.0),
        invdensity_dist=LogNormalSpec(0.006, 0.001),
        horizon_days=1,
        steps_per_day=10,
    )


@pytest.fixture
def tiny_settings() -> Dict[str, Any]:
    """Raw settings of a one-week experiment on the tight capacity preset"""
    return {
        "seed": 5,
        "name": "tiny",
        "departures": 7,
        "capacity_preset": "small",
        "weight_bucket_kg": 100.0,
        "volume_bucket_m3": 6.0,
        "estimator": {"hidden_layers": [8], "epochs": 3, "batch_size": 64},
    }


@pytest.fixture
def tiny_config(tiny_settings: Dict[str, Any]) -> ExperimentConfig:
    return experiment_from_dict(tiny_settings)


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[Dict[str, Any], str], Path]:
    """Fixture returning a helper that writes settings to a TOML file"""

    def _write(settings: Dict[str, Any], name: str = "experiment.toml") -> Path:
        path = tmp_path / name
        with open(path, "w") as f:
            toml.dump(settings, f)
        return path

    return _write
