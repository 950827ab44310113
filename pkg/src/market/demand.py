"""
Stochastic market for a single cargo leg.

Purchase probability follows the exponential willingness-to-pay model, arrivals
are Bernoulli-thinned Poisson draws on a grid of ``steps_per_day`` steps per day,
and shipment weight and inverse density are independent log-normals given by
their natural-scale mean and standard deviation.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import MarketConfig
from ..errors import CapacityRangeError, ParameterError


def lognormal_log_params(mean: float, sd: float) -> Tuple[float, float]:
    """
    Convert a natural-scale mean and standard deviation to log-space parameters.

    Args:
        mean: Mean of the log-normal variable (> 0)
        sd: Standard deviation of the variable (>= 0)

    Returns:
        Tuple[float, float]: (mu, sigma) of the underlying normal
    """
    if mean <= 0 or sd < 0:
        raise ParameterError(f"Log-normal needs mean > 0 and sd >= 0, got {mean}, {sd}")
    sigma2 = math.log1p((sd / mean) ** 2)
    return math.log(mean) - sigma2 / 2.0, math.sqrt(sigma2)


def days_prior_of_step(t_remaining: int, steps_per_day: int) -> int:
    """Days prior of a step with ``t_remaining`` steps left before departure."""
    return -(-t_remaining // steps_per_day)


@dataclass(frozen=True)
class LogNormalSpec:
    """Natural-scale moments of a log-normal size distribution."""

    mean: float
    sd: float

    def __post_init__(self) -> None:
        if self.mean <= 0 or self.sd < 0:
            raise ParameterError(
                f"Invalid log-normal spec: mean={self.mean}, sd={self.sd}"
            )

    @property
    def log_params(self) -> Tuple[float, float]:
        return lognormal_log_params(self.mean, self.sd)

    def sample(self, rng: np.random.Generator) -> float:
        mu, sigma = self.log_params
        if sigma == 0.0:
            return math.exp(mu)
        return float(rng.lognormal(mu, sigma))


@dataclass(frozen=True)
class DemandParams:
    """
    Every generative parameter of the simulated market.

    Vectors indexed by days prior hold d = 1 at position 0.

    Attributes:
        lambda_by_dp: Base mean arrival rate per day for each days prior
        alpha_by_dp: Mean willingness-to-pay per capacity unit for each days prior
        p0_by_dp: Minimal price per unit for each days prior (defaults to zeros)
        dow_factors: Seven day-of-week multipliers
        seasonality_base: Constant term of the sinusoidal seasonality factor
        seasonality_amplitude: Amplitude of the seasonality factor
        seasonality_period: Period of the seasonality factor, in departures
        weight_dist: Shipment weight in kg
        invdensity_dist: Shipment inverse density in m³/kg
        unit_kg: Weight of one pricing/capacity unit
        horizon_days: Booking horizon length in days
        steps_per_day: Time steps per day
    """

    lambda_by_dp: Tuple[float, ...]
    alpha_by_dp: Tuple[float, ...]
    p0_by_dp: Tuple[float, ...] = ()
    dow_factors: Tuple[float, ...] = MarketConfig.DOW_FACTORS
    seasonality_base: float = MarketConfig.SEASONALITY_BASE
    seasonality_amplitude: float = MarketConfig.SEASONALITY_AMPLITUDE
    seasonality_period: float = MarketConfig.SEASONALITY_PERIOD
    weight_dist: LogNormalSpec = field(
        default_factory=lambda: LogNormalSpec(
            MarketConfig.WEIGHT_MEAN_KG, MarketConfig.WEIGHT_SD_KG
        )
    )
    invdensity_dist: LogNormalSpec = field(
        default_factory=lambda: LogNormalSpec(
            MarketConfig.INVDENSITY_MEAN, MarketConfig.INVDENSITY_SD
        )
    )
    unit_kg: float = MarketConfig.UNIT_KG
    horizon_days: int = MarketConfig.HORIZON_DAYS
    steps_per_day: int = MarketConfig.STEPS_PER_DAY

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambda_by_dp", tuple(map(float, self.lambda_by_dp)))
        object.__setattr__(self, "alpha_by_dp", tuple(map(float, self.alpha_by_dp)))
        p0 = self.p0_by_dp or (0.0,) * self.horizon_days
        object.__setattr__(self, "p0_by_dp", tuple(map(float, p0)))
        object.__setattr__(self, "dow_factors", tuple(map(float, self.dow_factors)))
        self._validate()

    def _validate(self) -> None:
        if self.horizon_days < 1 or self.steps_per_day < 1:
            raise ParameterError("horizon_days and steps_per_day must be >= 1")
        for name in ("lambda_by_dp", "alpha_by_dp", "p0_by_dp"):
            if len(getattr(self, name)) != self.horizon_days:
                raise ParameterError(
                    f"{name} must have {self.horizon_days} entries (one per days prior)"
                )
        if any(rate < 0 for rate in self.lambda_by_dp):
            raise ParameterError("Arrival rates must be non-negative")
        if any(alpha <= 0 for alpha in self.alpha_by_dp):
            raise ParameterError("Mean willingness-to-pay must be strictly positive")
        if any(p0 < 0 for p0 in self.p0_by_dp):
            raise ParameterError("Minimal prices must be non-negative")
        if len(self.dow_factors) != 7 or any(f <= 0 for f in self.dow_factors):
            raise ParameterError("dow_factors needs exactly 7 positive entries")
        if self.seasonality_period <= 0 or self.unit_kg <= 0:
            raise ParameterError("seasonality_period and unit_kg must be positive")
        if self.invdensity_dist.sd <= 0:
            raise ParameterError("Inverse density sd must be strictly positive")

    @property
    def dt(self) -> float:
        """Length of one time step in days."""
        return 1.0 / self.steps_per_day

    @property
    def horizon_steps(self) -> int:
        return self.horizon_days * self.steps_per_day

    def alpha_at(self, days_prior: int) -> float:
        return self.alpha_by_dp[days_prior - 1]

    def p0_at(self, days_prior: int) -> float:
        return self.p0_by_dp[days_prior - 1]

    def seasonality_factor(self, departure_index: int) -> float:
        phase = 2.0 * math.pi * departure_index / self.seasonality_period
        return self.seasonality_base + self.seasonality_amplitude * math.sin(phase)

    def step_probabilities(self, departure_index: int) -> np.ndarray:
        """
        Arrival probability λ(t,d)·δt for every step of one flight.

        Returns:
            np.ndarray: Indexed by remaining steps t = 1..T at position t - 1
        """
        t = np.arange(1, self.horizon_steps + 1)
        days = -(-t // self.steps_per_day)
        rates = np.array(
            [arrival_rate(self, departure_index, int(d)) for d in range(1, self.horizon_days + 1)]
        )
        return rates[days - 1] * self.dt

    def step_alphas(self) -> np.ndarray:
        t = np.arange(1, self.horizon_steps + 1)
        return np.asarray(self.alpha_by_dp)[-(-t // self.steps_per_day) - 1]

    def step_p0s(self) -> np.ndarray:
        t = np.arange(1, self.horizon_steps + 1)
        return np.asarray(self.p0_by_dp)[-(-t // self.steps_per_day) - 1]

    def check_step_size(self, departures: int) -> None:
        """
        Enforce the small-interval Poisson approximation over a set of departures.

        Raises:
            ParameterError: If λ(t,d)·δt exceeds the configured bound anywhere
        """
        worst = max(
            float(self.step_probabilities(i).max(initial=0.0)) for i in range(departures)
        )
        if worst > MarketConfig.MAX_STEP_PROBABILITY + 1e-12:
            raise ParameterError(
                f"Arrival probability per step reaches {worst:.4f}; "
                f"must stay <= {MarketConfig.MAX_STEP_PROBABILITY}. "
                "Lower lambda_by_dp or raise steps_per_day."
            )

    @classmethod
    def standard(cls) -> "DemandParams":
        """Default market: late-rising demand over a ten-day horizon."""
        return cls(
            lambda_by_dp=MarketConfig.LAMBDA_BY_DP,
            alpha_by_dp=MarketConfig.ALPHA_BY_DP,
        )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DemandParams":
        data = dict(data)
        for key in ("weight_dist", "invdensity_dist"):
            if key in data and isinstance(data[key], dict):
                data[key] = LogNormalSpec(**data[key])
        try:
            return cls(**data)
        except TypeError as e:
            raise ParameterError(f"Unknown demand parameter: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda_by_dp": list(self.lambda_by_dp),
            "alpha_by_dp": list(self.alpha_by_dp),
            "p0_by_dp": list(self.p0_by_dp),
            "dow_factors": list(self.dow_factors),
            "seasonality_base": self.seasonality_base,
            "seasonality_amplitude": self.seasonality_amplitude,
            "seasonality_period": self.seasonality_period,
            "weight_dist": {"mean": self.weight_dist.mean, "sd": self.weight_dist.sd},
            "invdensity_dist": {
                "mean": self.invdensity_dist.mean,
                "sd": self.invdensity_dist.sd,
            },
            "unit_kg": self.unit_kg,
            "horizon_days": self.horizon_days,
            "steps_per_day": self.steps_per_day,
        }


@dataclass(frozen=True)
class ShipmentRequest:
    """
    One incoming booking request.

    Attributes:
        arrival_step: Remaining steps to departure when the request arrives
        days_prior: Days prior of the arrival step
        weight_kg: Actual shipment weight
        volume_m3: Shipment volume (weight times sampled inverse density)
        batch_units: Weight rounded to capacity units, at least 1
        accept_draw: Uniform draw compared to the purchase probability
    """

    arrival_step: int
    days_prior: int
    weight_kg: float
    volume_m3: float
    batch_units: int
    accept_draw: float = 0.5

    def rated_weight_kg(self, unit_kg: float) -> float:
        """Weight capacity the shipment consumes once accepted."""
        return self.batch_units * unit_kg


def purchase_probability(p: float, p0: float, alpha: float) -> float:
    """
    Probability that a customer buys at unit price ``p``: exp(-(p - p0) / alpha).

    Raises:
        ParameterError: If alpha is not positive or p is negative
    """
    if alpha <= 0:
        raise ParameterError(f"Mean willingness-to-pay must be positive, got {alpha}")
    if p < 0:
        raise ParameterError(f"Price must be non-negative, got {p}")
    return min(1.0, math.exp(-(p - p0) / alpha))


def arrival_rate(params: DemandParams, departure_index: int, days_prior: int) -> float:
    """
    Mean arrival rate per day for a departure and days prior.

    Args:
        params: Market parameters
        departure_index: Zero-based departure date index
        days_prior: Days before departure, 1..horizon_days

    Returns:
        float: λ_d x seasonality(i) x dow[i mod 7]

    Raises:
        CapacityRangeError: If days_prior is outside the booking horizon
    """
    if departure_index < 0:
        raise ParameterError(f"departure_index must be >= 0, got {departure_index}")
    if not 1 <= days_prior <= params.horizon_days:
        raise CapacityRangeError(
            f"days_prior {days_prior} outside horizon 1..{params.horizon_days}"
        )
    return (
        params.lambda_by_dp[days_prior - 1]
        * params.seasonality_factor(departure_index)
        * params.dow_factors[departure_index % 7]
    )


def sample_request(
    params: DemandParams,
    rng: np.random.Generator,
    departure_index: int,
    days_prior: int,
    arrival_step: Optional[int] = None,
) -> Optional[ShipmentRequest]:
    """
    Draw the outcome of one time step.

    Draw order is fixed: arrival uniform, then (on arrival) weight, inverse
    density and the purchase uniform.

    Returns:
        Optional[ShipmentRequest]: The request, or None if nothing arrived
    """
    probability = arrival_rate(params, departure_index, days_prior) * params.dt
    if rng.random() >= probability:
        return None
    weight = params.weight_dist.sample(rng)
    inverse_density = params.invdensity_dist.sample(rng)
    accept_draw = float(rng.random())
    units = max(1, int(math.floor(weight / params.unit_kg + 0.5)))
    return ShipmentRequest(
        arrival_step=(
            arrival_step if arrival_step is not None else days_prior * params.steps_per_day
        ),
        days_prior=days_prior,
        weight_kg=weight,
        volume_m3=weight * inverse_density,
        batch_units=units,
        accept_draw=accept_draw,
    )


def sample_stream(
    params: DemandParams, rng: np.random.Generator, departure_index: int
) -> List[ShipmentRequest]:
    """All requests of one flight, from horizon start to departure."""
    stream: List[ShipmentRequest] = []
    for t in range(params.horizon_steps, 0, -1):
        request = sample_request(
            params, rng, departure_index, days_prior_of_step(t, params.steps_per_day), t
        )
        if request is not None:
            stream.append(request)
    return stream


def flight_rng(master_seed: int, phase: int, departure_index: int) -> np.random.Generator:
    """Independent generator for one (phase, flight) pair."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(phase, departure_index))
    return np.random.default_rng(seq)


def volume_moments(
    weight: LogNormalSpec, invdensity: LogNormalSpec
) -> Tuple[float, float]:
    """Mean and sd of volume = weight x inverse density for independent factors."""
    mean = weight.mean * invdensity.mean
    second = (weight.mean**2 + weight.sd**2) * (invdensity.mean**2 + invdensity.sd**2)
    return mean, math.sqrt(second - mean**2)


def batch_units_of(weights: Sequence[float], unit_kg: float) -> np.ndarray:
    """Vectorized rounding of weights to capacity units (at least one unit)."""
    units = np.floor(np.asarray(weights, dtype=float) / unit_kg + 0.5).astype(int)
    return np.maximum(units, 1)
