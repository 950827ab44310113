"""
Experiment orchestration.

Baseline study (weight only):
    1. simulate the training flights under the optimal policy
    2. build observations and train the weight estimator
    3. replay identical evaluation streams under the optimal and the
       data-driven policy and compare weekly revenue

Scenario study (weight and volume):
    1. simulate the training flights under the weight-optimal policy with a
       volume feasibility gate
    2. build weight and volume observation sets per proration mode and train
       one estimator per set
    3. replay identical evaluation streams under every scenario policy
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import Config, PricingConfig
from ..config.experiment import (
    REFERENCE_SCENARIO,
    ExperimentConfig,
    ScenarioConfig,
)
from ..datadriven import (
    BookingRecord,
    FeatureConfig,
    MlpModel,
    Observation,
    ProrationMode,
    build_observations,
    train,
)
from ..errors import DataError
from ..market import ShipmentRequest, flight_rng, sample_stream
from ..optimal import ValueTableCache, batch_cap, batch_dist_from_weight
from ..pricing import PricingPolicy
from ..pricing.implementation import DataDrivenPolicy, OptimalPolicy, ZeroBidPolicy
from .flight import FlightCapacity, FlightResult, replay_flight
from .reporting import mean_weekly_gap

logger = logging.getLogger(__name__)

VOLUME_GATE_NOTE = (
    "training history generated by the weight-optimal policy with a volume "
    "feasibility gate (volume bid price 0)"
)


@dataclass
class StudyReport:
    """
    Everything a study produced.

    Attributes:
        kind: "baseline" or "scenarios"
        reference: Policy the gaps are measured against
        results: Per-policy flight rows, in departure order
        history: Training bookings
        observations: Observation sets keyed "<dimension>_<mode>"
        models: Trained estimators keyed like observations
        notes: Free-text remarks copied into summaries
    """

    kind: str
    reference: str
    results: Dict[str, List[FlightResult]]
    history: List[BookingRecord] = field(default_factory=list)
    observations: Dict[str, List[Observation]] = field(default_factory=dict)
    models: Dict[str, MlpModel] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def mean_gap(self, policy: str) -> float:
        return mean_weekly_gap(self.results[self.reference], self.results[policy])

    def total_revenue(self, policy: str) -> float:
        return sum(r.revenue for r in self.results[policy])


@dataclass(frozen=True)
class SeedSweep:
    seeds: Tuple[int, ...]
    mean_gaps: Tuple[float, ...]

    @property
    def mean_of_means(self) -> float:
        return float(np.mean(self.mean_gaps))


def default_threads() -> int:
    return os.cpu_count() or 1


def model_seed(master_seed: int, index: int) -> int:
    """Independent integer seed for the index-th estimator of a run."""
    sequence = np.random.SeedSequence(master_seed, spawn_key=(Config.MODEL_PHASE, index))
    return int(sequence.generate_state(1)[0])


def draw_streams(
    config: ExperimentConfig, phase: int, departures: Optional[int] = None
) -> List[List[ShipmentRequest]]:
    """One request stream per departure, each from its own generator."""
    count = config.departures if departures is None else departures
    return [
        sample_stream(config.demand, flight_rng(config.seed, phase, i), i) for i in range(count)
    ]


def value_cache(config: ExperimentConfig, threads: int = 1) -> ValueTableCache:
    """Cache large enough that no flight in progress loses its tables."""
    dist = batch_dist_from_weight(config.demand, batch_cap(config.demand))
    size = max(PricingConfig.VALUE_CACHE_SIZE, 2 * threads)
    return ValueTableCache(config.demand, dist, config.capacity_units, size)


def run_policies(
    policies: Sequence[PricingPolicy],
    streams: Sequence[Sequence[ShipmentRequest]],
    capacity: FlightCapacity,
    threads: int = 1,
) -> Tuple[Dict[str, List[FlightResult]], Dict[str, List[BookingRecord]]]:
    """
    Replay every stream under every policy.

    Flights run in parallel when ``threads`` > 1; results are always returned
    in departure order, so the thread count never changes the output.

    Returns:
        Tuple: per-policy flight rows and per-policy accepted bookings
    """
    names = [p.name for p in policies]
    if len(set(names)) != len(names):
        raise DataError(f"Policy names must be unique, got {names}")

    def simulate(departure_index: int):
        stream = streams[departure_index]
        return [replay_flight(p, stream, capacity, departure_index) for p in policies]

    indices = range(len(streams))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            per_flight = list(executor.map(simulate, indices))
    else:
        per_flight = [simulate(i) for i in indices]

    results: Dict[str, List[FlightResult]] = {name: [] for name in names}
    bookings: Dict[str, List[BookingRecord]] = {name: [] for name in names}
    for outcomes in per_flight:
        for name, (row, booked) in zip(names, outcomes):
            results[name].append(row)
            bookings[name].extend(booked)
    return results, bookings


def generate_history(
    config: ExperimentConfig,
    threads: int = 1,
    track_volume: bool = False,
    cache: Optional[ValueTableCache] = None,
) -> List[BookingRecord]:
    """
    Simulate the training flights under the optimal weight policy.

    Args:
        config: Experiment configuration
        threads: Worker threads
        track_volume: Reject shipments that exceed the remaining volume
        cache: Solved value tables to reuse

    Returns:
        List[BookingRecord]: Accepted bookings of every training flight
    """
    cache = cache or value_cache(config, threads)
    policy = OptimalPolicy(config.demand, cache, name="history")
    capacity = FlightCapacity(
        config.weight_capacity_kg, config.volume_capacity_m3 if track_volume else None
    )
    streams = draw_streams(config, Config.TRAIN_PHASE)
    _, bookings = run_policies([policy], streams, capacity, threads)
    history = bookings["history"]
    logger.info("Simulated %d training flights, %d bookings", len(streams), len(history))
    return history


def observation_key(dimension: str, mode: ProrationMode) -> str:
    return f"{dimension}_{ProrationMode(mode).value}"


def feature_config(config: ExperimentConfig, dimension: str) -> FeatureConfig:
    capacity = config.weight_capacity_kg if dimension == "weight" else config.volume_capacity_m3
    return FeatureConfig(
        capacity=capacity,
        horizon=float(config.demand.horizon_days),
        seasonality_period=config.demand.seasonality_period,
        harmonics=config.estimator.harmonics,
    )


def build_observation_sets(
    config: ExperimentConfig,
    history: Sequence[BookingRecord],
    sets: Iterable[Tuple[str, ProrationMode]],
) -> Dict[str, List[Observation]]:
    """Observation sets for each requested (dimension, proration mode)."""
    observations: Dict[str, List[Observation]] = {}
    for dimension, mode in sets:
        buckets = config.weight_buckets if dimension == "weight" else config.volume_buckets
        observations[observation_key(dimension, mode)] = build_observations(
            history,
            config.dcps,
            buckets,
            dimension=dimension,
            mode=mode,
            factor=config.inverse_density_factor,
            departures=range(config.departures),
        )
    return observations


def train_estimators(
    config: ExperimentConfig, observations: Dict[str, List[Observation]]
) -> Dict[str, MlpModel]:
    """One estimator per observation set, each with its own derived seed."""
    models: Dict[str, MlpModel] = {}
    for index, (key, rows) in enumerate(sorted(observations.items())):
        dimension = key.split("_", 1)[0]
        models[key] = train(
            rows,
            config.estimator,
            model_seed(config.seed, index),
            features=feature_config(config, dimension),
            dimension=dimension,
        )
    return models


def run_baseline_study(
    config: ExperimentConfig,
    threads: int = 1,
    history: Optional[List[BookingRecord]] = None,
) -> StudyReport:
    """
    Optimal versus data-driven bid prices on a weight-only flight.

    Args:
        config: Experiment configuration
        threads: Worker threads for the flight simulations
        history: Training bookings to reuse instead of simulating them

    Returns:
        StudyReport: Reference policy "optimal"
    """
    cache = value_cache(config, threads)
    if history is None:
        history = generate_history(config, threads, cache=cache)
    observations = build_observation_sets(config, history, [("weight", ProrationMode.NONE)])
    models = train_estimators(config, observations)

    policies: List[PricingPolicy] = [
        OptimalPolicy(config.demand, cache, name="optimal"),
        DataDrivenPolicy(
            config.demand,
            models[observation_key("weight", ProrationMode.NONE)],
            config.weight_buckets,
            config.dcps,
            name="data_driven",
        ),
    ]
    if config.include_zero_bid:
        policies.append(ZeroBidPolicy(config.demand))
    streams = draw_streams(config, Config.EVAL_PHASE)
    results, _ = run_policies(policies, streams, FlightCapacity(config.weight_capacity_kg), threads)
    report = StudyReport("baseline", "optimal", results, list(history), observations, models)
    logger.info("Baseline mean weekly gap: %.3f%%", 100 * report.mean_gap("data_driven"))
    return report


def run_scenario_study(
    config: ExperimentConfig,
    threads: int = 1,
    history: Optional[List[BookingRecord]] = None,
) -> StudyReport:
    """
    Weight/volume handling scenarios on a flight with both capacities.

    Returns:
        StudyReport: Reference "max_original" when it is among the scenarios,
        otherwise the first scenario
    """
    scenarios = [ScenarioConfig.by_name(name) for name in config.scenarios]
    if not scenarios:
        raise DataError("The scenario study needs at least one scenario")
    if history is None:
        history = generate_history(config, threads, track_volume=True)
    modes = sorted({s.proration for s in scenarios}, key=lambda m: m.value)
    observations = build_observation_sets(
        config, history, [(dim, mode) for mode in modes for dim in ("weight", "volume")]
    )
    models = train_estimators(config, observations)

    policies: List[PricingPolicy] = [
        DataDrivenPolicy(
            config.demand,
            models[observation_key("weight", s.proration)],
            config.weight_buckets,
            config.dcps,
            volume_model=models[observation_key("volume", s.proration)],
            volume_buckets=config.volume_buckets,
            mode=s.combine,
            name=s.name,
        )
        for s in scenarios
    ]
    if config.include_zero_bid:
        policies.append(ZeroBidPolicy(config.demand))
    reference = REFERENCE_SCENARIO if REFERENCE_SCENARIO in config.scenarios else scenarios[0].name
    capacity = FlightCapacity(config.weight_capacity_kg, config.volume_capacity_m3)
    results, _ = run_policies(policies, draw_streams(config, Config.EVAL_PHASE), capacity, threads)
    report = StudyReport(
        "scenarios", reference, results, list(history), observations, models, [VOLUME_GATE_NOTE]
    )
    for s in scenarios:
        logger.info("%s: mean weekly gap %.3f%%", s.name, 100 * report.mean_gap(s.name))
    return report


def run_seed_sweep(
    config: ExperimentConfig,
    seeds: Sequence[int],
    threads: int = 1,
    known: Optional[Dict[int, float]] = None,
) -> SeedSweep:
    """
    Baseline study repeated per seed; records each seed's mean weekly gap.

    Args:
        config: Experiment configuration; its seed is replaced per run
        seeds: Master seeds to run
        threads: Worker threads
        known: Mean gaps already computed, keyed by seed; those seeds are not rerun
    """
    known = known or {}
    gaps = []
    for seed in seeds:
        if seed in known:
            gaps.append(known[seed])
            continue
        report = run_baseline_study(config.with_seed(seed), threads)
        gaps.append(report.mean_gap("data_driven"))
    sweep = SeedSweep(tuple(int(s) for s in seeds), tuple(gaps))
    logger.info("Seed sweep mean of means: %.3f%%", 100 * sweep.mean_of_means)
    return sweep
