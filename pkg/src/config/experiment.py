"""
Experiment and scenario configuration.

An experiment file is TOML (or JSON with a ``.json`` suffix). The master seed is
mandatory; every other field falls back to the defaults in this package.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from ..datadriven.estimator import EstimatorConfig
from ..datadriven.proration import ProrationMode
from ..errors import ConfigError, ParameterError
from ..market import DemandParams
from ..pricing import BucketSpec, CombineMode
from ..utils.files import load_structured_file, stable_hash
from .pricing_settings import PricingConfig


@dataclass(frozen=True)
class ScenarioConfig:
    """
    One weight/volume handling scenario.

    Attributes:
        name: Scenario label
        proration: Which revenue each dimension's estimator is trained on
        combine: How weight and volume total bid prices are merged
    """

    name: str
    proration: ProrationMode
    combine: CombineMode

    @classmethod
    def by_name(cls, name: str) -> "ScenarioConfig":
        try:
            return CANONICAL_SCENARIOS[name]
        except KeyError:
            raise ParameterError(
                f"Unknown scenario {name!r}; choose from {', '.join(CANONICAL_SCENARIOS)}"
            ) from None


CANONICAL_SCENARIOS: Dict[str, ScenarioConfig] = {
    "max_original": ScenarioConfig("max_original", ProrationMode.NONE, CombineMode.MAX),
    "sum_original": ScenarioConfig("sum_original", ProrationMode.NONE, CombineMode.SUM),
    "sum_prorated_weight": ScenarioConfig(
        "sum_prorated_weight", ProrationMode.WEIGHT_DOMINATED, CombineMode.SUM
    ),
    "sum_prorated_volume": ScenarioConfig(
        "sum_prorated_volume", ProrationMode.VOLUME_DOMINATED, CombineMode.SUM
    ),
}
REFERENCE_SCENARIO = "max_original"


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything one study needs; all randomness derives from ``seed``.

    Attributes:
        seed: Master seed
        name: Experiment label, used as the results subdirectory
        demand: Market parameters
        weight_capacity_kg: Weight capacity of every flight
        volume_capacity_m3: Volume capacity of every flight
        departures: Number of departure dates simulated per phase
        weight_bucket_kg: Width of weight capacity buckets
        volume_bucket_m3: Width of volume capacity buckets
        inverse_density_factor: Standard inverse density used by proration
        estimator: Network and optimizer settings
        scenarios: Scenario names run by the weight/volume study
        include_zero_bid: Also evaluate the zero-bid control policy
    """

    seed: int
    name: str = "experiment"
    demand: DemandParams = field(default_factory=DemandParams.standard)
    weight_capacity_kg: float = PricingConfig.CAPACITY_PRESETS[PricingConfig.DEFAULT_PRESET][0]
    volume_capacity_m3: float = PricingConfig.CAPACITY_PRESETS[PricingConfig.DEFAULT_PRESET][1]
    departures: int = PricingConfig.DEFAULT_DEPARTURES
    weight_bucket_kg: float = PricingConfig.WEIGHT_BUCKET_KG
    volume_bucket_m3: float = PricingConfig.VOLUME_BUCKET_M3
    inverse_density_factor: float = PricingConfig.INVERSE_DENSITY_FACTOR
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    scenarios: Tuple[str, ...] = tuple(CANONICAL_SCENARIOS)
    include_zero_bid: bool = False

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ParameterError(f"seed must be >= 0, got {self.seed}")
        if self.weight_capacity_kg <= 0 or self.volume_capacity_m3 <= 0:
            raise ParameterError("Capacities must be positive")
        if self.departures < 1:
            raise ParameterError(f"departures must be >= 1, got {self.departures}")
        if self.inverse_density_factor <= 0:
            raise ParameterError("inverse_density_factor must be positive")
        units = self.weight_capacity_kg / self.demand.unit_kg
        if abs(units - round(units)) > 1e-9:
            raise ParameterError(
                f"Weight capacity {self.weight_capacity_kg} kg is not a whole number "
                f"of {self.demand.unit_kg} kg units"
            )
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        for name in self.scenarios:
            ScenarioConfig.by_name(name)

    @property
    def capacity_units(self) -> int:
        return int(round(self.weight_capacity_kg / self.demand.unit_kg))

    @property
    def dcps(self) -> Tuple[int, ...]:
        return tuple(range(self.demand.horizon_days, 0, -1))

    @property
    def weight_buckets(self) -> BucketSpec:
        return BucketSpec.uniform(self.weight_capacity_kg, self.weight_bucket_kg)

    @property
    def volume_buckets(self) -> BucketSpec:
        return BucketSpec.uniform(self.volume_capacity_m3, self.volume_bucket_m3)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        data = self.to_dict()
        data["seed"] = seed
        return experiment_from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "name": self.name,
            "departures": self.departures,
            "weight_capacity_kg": self.weight_capacity_kg,
            "volume_capacity_m3": self.volume_capacity_m3,
            "weight_bucket_kg": self.weight_bucket_kg,
            "volume_bucket_m3": self.volume_bucket_m3,
            "inverse_density_factor": self.inverse_density_factor,
            "include_zero_bid": self.include_zero_bid,
            "scenarios": list(self.scenarios),
            "demand": self.demand.to_dict(),
            "estimator": self.estimator.to_dict(),
        }

    def config_hash(self) -> str:
        return stable_hash(self.to_dict())


_TOP_LEVEL_KEYS = {
    "seed",
    "name",
    "departures",
    "weight_capacity_kg",
    "volume_capacity_m3",
    "capacity_preset",
    "weight_bucket_kg",
    "volume_bucket_m3",
    "inverse_density_factor",
    "include_zero_bid",
    "scenarios",
    "demand",
    "estimator",
}


def experiment_from_dict(data: Dict[str, Any], source: str = "<config>") -> ExperimentConfig:
    """
    Build an ExperimentConfig from parsed file contents.

    Raises:
        ConfigError: On unknown keys, a missing seed or invalid values
    """
    unknown = sorted(set(data) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ConfigError(f"{source}: unknown field(s) {', '.join(unknown)}")
    if "seed" not in data:
        raise ConfigError(f"{source}: field 'seed' is mandatory")
    values = {k: v for k, v in data.items() if k not in ("demand", "estimator", "capacity_preset")}

    preset = data.get("capacity_preset")
    if preset is not None:
        if preset not in PricingConfig.CAPACITY_PRESETS:
            raise ConfigError(
                f"{source}: capacity_preset must be one of "
                f"{', '.join(PricingConfig.CAPACITY_PRESETS)}, got {preset!r}"
            )
        weight, volume = PricingConfig.CAPACITY_PRESETS[preset]
        values.setdefault("weight_capacity_kg", weight)
        values.setdefault("volume_capacity_m3", volume)

    try:
        demand = data.get("demand")
        if demand is not None:
            base = DemandParams.standard().to_dict()
            if "horizon_days" in demand and "p0_by_dp" not in demand:
                del base["p0_by_dp"]
            base.update(demand)
            values["demand"] = DemandParams.from_dict(base)
        if "estimator" in data:
            values["estimator"] = EstimatorConfig.from_dict(data["estimator"])
        if "scenarios" in values:
            values["scenarios"] = tuple(values["scenarios"])
        config = ExperimentConfig(**values)
    except (ParameterError, TypeError) as e:
        raise ConfigError(f"{source}: {e}") from e
    return config


def load_experiment_config(path: Path, seed: Optional[int] = None) -> ExperimentConfig:
    """
    Load and validate an experiment file.

    Args:
        path: TOML or JSON experiment file
        seed: Overrides the file's seed when given

    Returns:
        ExperimentConfig: Validated configuration

    Raises:
        ConfigError: If the file is missing, malformed or invalid
    """
    data = load_structured_file(path)
    if seed is not None:
        data["seed"] = seed
    config = experiment_from_dict(data, str(path))
    try:
        config.demand.check_step_size(config.departures)
    except ParameterError as e:
        raise ConfigError(f"{path}: {e}") from e
    return config
