"""
Exact value function for single-leg dynamic pricing with batch arrivals.

State is the remaining number of capacity units x and the remaining number of
time steps t. Each step sees at most one arrival with probability λ(t)·δt; the
arrival buys at unit price p with probability exp(-(p - p0)/α) and requests k
units with probability π_k. Requests larger than x are rejected outright.
Under exponential demand the maximizing price has the closed form
p* = max(p0, α + Σ π_k ΔᵏV / Σ k π_k) over k <= min(x, K).
"""

import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd

from ..config import PricingConfig
from ..errors import InsufficientCapacityError, NoCapacityError, ParameterError
from ..market import DemandParams
from ..pricing import BidPriceTable, BucketSpec
from .batch import BatchDist

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ValueTable:
    """
    Expected revenue-to-come V(x, t).

    Attributes:
        values: Array of shape (C + 1, T + 1); row x, column t
        unit_kg: Capacity represented by one unit
    """

    values: np.ndarray
    unit_kg: float = 1.0

    @property
    def capacity_units(self) -> int:
        return self.values.shape[0] - 1

    @property
    def horizon_steps(self) -> int:
        return self.values.shape[1] - 1

    def __call__(self, x: int, t: int) -> float:
        return float(self.values[x, t])


@dataclass(frozen=True)
class OptimalBidTable:
    """
    Optimal unit bid prices b*(x, t) = V(x, t) - V(x - 1, t); row 0 is zero.

    No monotonicity in x or t is implied: batch arrivals with full
    accept/reject break the classical structure.
    """

    bid: np.ndarray

    def __call__(self, x: int, t: int) -> float:
        return float(self.bid[x, t])

    def to_bid_table(
        self, t: int, unit_kg: float, departure_index: int = 0
    ) -> BidPriceTable:
        """
        Unit-granular bid-price table at time ``t`` in weight terms.

        Breakpoints sit at every unit (unit_kg, 2*unit_kg, ...), values are the
        unit bid divided by unit_kg, so integrating over k consumed units gives
        Σ_{j<k} b*(x - j, t).
        """
        C = self.bid.shape[0] - 1
        breakpoints = unit_kg * np.arange(1, C + 1, dtype=float)
        values = (self.bid[1:, t] / unit_kg).reshape(-1, 1)
        return BidPriceTable(
            dimension="weight",
            buckets=BucketSpec(breakpoints),
            dcps=(t,),
            values=np.clip(values, 0.0, None),
            source="optimal",
            departure_index=departure_index,
        )


def _batch_kernel(
    dist: BatchDist, capacity_units: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Time-independent parts of the batch sums for x = 1..C.

    Returns:
        Tuple: padded probabilities (entry k holds π_k for k <= min(C, K), entry 0
        is zero), Σ π_k and Σ k π_k over k <= min(x, K)
    """
    C = capacity_units
    m = min(C, dist.K)
    padded = np.zeros(C + 1)
    padded[1 : m + 1] = dist.probs[:m]
    reach = np.cumsum(padded)[1:]
    denom = np.cumsum(padded * np.arange(C + 1))[1:]
    return padded, reach, denom


def _batch_numerator(
    prev: np.ndarray, padded: np.ndarray, reach: np.ndarray
) -> np.ndarray:
    """
    Σ π_k ΔᵏV(x) over feasible k <= min(x, K), for x = 1..C.

    Args:
        prev: V(., t - 1), length C + 1
        padded: Probabilities from _batch_kernel
        reach: Σ π_k from _batch_kernel

    Returns:
        np.ndarray: Length C
    """
    C = prev.size - 1
    # convolve(prev, padded)[x] = Σ_k π_k V(x - k)
    return prev[1:] * reach - np.convolve(prev, padded)[1 : C + 1]


def backward_induction(
    step_probs: np.ndarray,
    alphas: np.ndarray,
    p0s: np.ndarray,
    dist: BatchDist,
    capacity_units: int,
) -> ValueTable:
    """
    Solve V(x, t) for explicit per-step inputs.

    Args:
        step_probs: Arrival probability λ(t)·δt for t = 1..T (index t - 1)
        alphas: Mean WTP per unit for t = 1..T
        p0s: Minimal price per unit for t = 1..T
        dist: Batch size distribution
        capacity_units: Capacity C in units

    Returns:
        ValueTable: Shape (C + 1, T + 1)
    """
    if capacity_units < 1:
        raise ParameterError(f"Capacity must be >= 1 unit, got {capacity_units}")
    step_probs = np.asarray(step_probs, dtype=float)
    alphas = np.asarray(alphas, dtype=float)
    p0s = np.asarray(p0s, dtype=float)
    T = step_probs.size
    if T < 1 or alphas.size != T or p0s.size != T:
        raise ParameterError("Per-step arrays must share a positive length")

    V = np.zeros((capacity_units + 1, T + 1))
    padded, reach, denom = _batch_kernel(dist, capacity_units)
    safe = denom > 0
    for t in range(1, T + 1):
        prev = V[:, t - 1]
        numer = _batch_numerator(prev, padded, reach)
        alpha, p0, rate = alphas[t - 1], p0s[t - 1], step_probs[t - 1]
        ratio = np.divide(numer, denom, out=np.zeros_like(numer), where=safe)
        price = np.maximum(p0, alpha + ratio)
        buy = np.minimum(1.0, np.exp(-(price - p0) / alpha))
        gain = np.where(safe, rate * buy * (price * denom - numer), 0.0)
        V[1:, t] = prev[1:] + gain
    V.setflags(write=False)
    return ValueTable(V)


def bid_prices(table: ValueTable) -> OptimalBidTable:
    """b*(x, t) for every state, row 0 set to zero."""
    bid = np.zeros_like(table.values)
    bid[1:, :] = np.diff(table.values, axis=0)
    bid.setflags(write=False)
    return OptimalBidTable(bid)


def solve_value_function(
    params: DemandParams, dist: BatchDist, C_units: int, departure_index: int
) -> Tuple[ValueTable, OptimalBidTable]:
    """
    Value function and optimal bid prices of one departure.

    Args:
        params: Market parameters; the flight's own λ(t, d) is used
        dist: Batch size distribution
        C_units: Capacity in units
        departure_index: Departure date index

    Returns:
        Tuple[ValueTable, OptimalBidTable]
    """
    table = backward_induction(
        params.step_probabilities(departure_index),
        params.step_alphas(),
        params.step_p0s(),
        dist,
        C_units,
    )
    table = ValueTable(table.values, unit_kg=params.unit_kg)
    return table, bid_prices(table)


def optimal_price(
    x: int, t: int, V: ValueTable, dist: BatchDist, alpha: float, p0: float = 0.0
) -> float:
    """
    Optimal unit price before the batch size is known.

    Raises:
        NoCapacityError: If x is zero
    """
    if x <= 0:
        raise NoCapacityError("No remaining capacity to price")
    if t < 1:
        raise ParameterError(f"Time step must be >= 1, got {t}")
    prev = V.values[:, t - 1]
    m = min(x, dist.K)
    k = np.arange(1, m + 1)
    numer = float(dist.probs[:m] @ (prev[x] - prev[x - k]))
    denom = float(dist.probs[:m] @ k)
    if denom <= 0:
        return max(p0, alpha)
    return max(p0, alpha + numer / denom)


def optimal_policy_price(
    x: int, t: int, k: int, bid: OptimalBidTable, alpha: float
) -> float:
    """
    Optimal unit price once the batch size k is known.

    Returns:
        float: alpha + (b*(x, t-1) + ... + b*(x-k+1, t-1)) / k

    Raises:
        InsufficientCapacityError: If k exceeds x
    """
    if k < 1:
        raise ParameterError(f"Batch size must be >= 1, got {k}")
    if k > x:
        raise InsufficientCapacityError(f"Batch of {k} units exceeds remaining {x}")
    column = bid.bid[:, t - 1]
    return alpha + float(column[x - k + 1 : x + 1].sum()) / k


def export_tables_csv(values: ValueTable, bids: OptimalBidTable, path: Path) -> Path:
    """Write one row per state with columns x, t, value, bid."""
    x, t = np.meshgrid(
        np.arange(values.values.shape[0]), np.arange(values.values.shape[1]), indexing="ij"
    )
    frame = pd.DataFrame(
        {
            "x": x.ravel(),
            "t": t.ravel(),
            "value": values.values.ravel(),
            "bid": bids.bid.ravel(),
        }
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return path


class ValueTableCache:
    """
    Solved tables per departure; safe to share between worker threads.

    Keeps the most recently used ``max_tables`` departures. An evicted
    departure is solved again on its next request.
    """

    def __init__(
        self,
        params: DemandParams,
        dist: BatchDist,
        capacity_units: int,
        max_tables: int = PricingConfig.VALUE_CACHE_SIZE,
    ):
        if max_tables < 1:
            raise ParameterError(f"max_tables must be >= 1, got {max_tables}")
        self.params = params
        self.dist = dist
        self.capacity_units = capacity_units
        self.max_tables = max_tables
        self._tables: "OrderedDict[int, Tuple[ValueTable, OptimalBidTable]]"
        self._tables = OrderedDict()
        self._lock = threading.Lock()

    def get(self, departure_index: int) -> Tuple[ValueTable, OptimalBidTable]:
        with self._lock:
            cached = self._tables.get(departure_index)
            if cached is not None:
                self._tables.move_to_end(departure_index)
                return cached
        solved = solve_value_function(
            self.params, self.dist, self.capacity_units, departure_index
        )
        logger.debug(
            "Solved departure %d: V(C, T) = %.2f",
            departure_index,
            solved[0].values[-1, -1],
        )
        with self._lock:
            solved = self._tables.setdefault(departure_index, solved)
            self._tables.move_to_end(departure_index)
            while len(self._tables) > self.max_tables:
                self._tables.popitem(last=False)
            return solved

    def __len__(self) -> int:
        return len(self._tables)
