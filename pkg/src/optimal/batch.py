import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import lognorm

from ..config import PricingConfig
from ..errors import ParameterError
from ..market import DemandParams


@dataclass(frozen=True)
class BatchDist:
    """
    Probability π_k that an arriving shipment needs k capacity units, k = 1..K.

    Attributes:
        probs: Array of length K, entry k - 1 holds π_k
    """

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ParameterError("Batch distribution needs at least one entry")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ParameterError(
                f"Batch probabilities must be non-negative and sum to 1, sum={probs.sum()}"
            )
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def K(self) -> int:
        return int(self.probs.size)

    @property
    def sizes(self) -> np.ndarray:
        return np.arange(1, self.K + 1)

    @property
    def mean(self) -> float:
        return float(self.sizes @ self.probs)


def batch_cap(params: DemandParams, tol: float = PricingConfig.BATCH_TAIL_TOLERANCE) -> int:
    """
    Smallest K such that P(batch > K units) < tol.

    Args:
        params: Market parameters (weight law and unit size)
        tol: Tail probability bound

    Returns:
        int: Batch cap K >= 1
    """
    mu, sigma = params.weight_dist.log_params
    u = params.unit_kg
    if sigma == 0.0:
        return max(1, int(math.floor(math.exp(mu) / u + 0.5)))
    tail_weight = float(lognorm.isf(tol, s=sigma, scale=math.exp(mu)))
    return max(1, int(math.floor(tail_weight / u - 0.5)) + 1)


def batch_dist_from_weight(params: DemandParams, K: int) -> BatchDist:
    """
    Discretize the shipment weight law into capacity-unit batch probabilities.

    A weight w maps to max(1, floor(w / unit + 1/2)) units; the mass of every
    size >= K is folded into π_K.

    Args:
        params: Market parameters
        K: Largest batch size kept (>= 1)

    Returns:
        BatchDist: Probabilities summing to one
    """
    if K < 1:
        raise ParameterError(f"Batch cap must be >= 1, got {K}")
    mu, sigma = params.weight_dist.log_params
    u = params.unit_kg
    if sigma == 0.0:
        probs = np.zeros(K)
        units = max(1, int(math.floor(math.exp(mu) / u + 0.5)))
        probs[min(units, K) - 1] = 1.0
        return BatchDist(probs)

    # Upper rounding edges of sizes 1..K-1; size 1 also absorbs weights below u/2
    edges = (np.arange(1, K) + 0.5) * u
    cdf = lognorm.cdf(edges, s=sigma, scale=math.exp(mu))
    cumulative = np.concatenate([cdf, [1.0]])
    probs = np.diff(cumulative, prepend=0.0)
    probs = np.clip(probs, 0.0, None)
    return BatchDist(probs / probs.sum())
