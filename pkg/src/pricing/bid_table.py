"""
Bucketed bid-price tables and the arithmetic that turns them into quotes.

A table holds one unit bid price per (capacity bucket, DCP). Bucket k covers
remaining capacity in (b_{k-1}, b_k]; a remaining level of exactly zero falls
into the first bucket. A request consuming q units of a dimension with r
remaining integrates the unit bid price over [r - q, r].
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import CapacityRangeError, InsufficientCapacityError, ParameterError
from ..market import ShipmentRequest

_RANGE_TOL = 1e-9


@dataclass(frozen=True)
class BucketSpec:
    """
    Capacity breakpoints b_1 < ... < b_|B|; the last one is the dimension's capacity.
    """

    breakpoints: np.ndarray

    def __post_init__(self) -> None:
        b = np.asarray(self.breakpoints, dtype=float)
        if b.ndim != 1 or b.size == 0:
            raise ParameterError("Bucket spec needs at least one breakpoint")
        if b[0] <= 0 or np.any(np.diff(b) <= 0):
            raise ParameterError("Breakpoints must be positive and strictly increasing")
        b.setflags(write=False)
        object.__setattr__(self, "breakpoints", b)

    @property
    def capacity(self) -> float:
        return float(self.breakpoints[-1])

    @property
    def edges(self) -> np.ndarray:
        """Breakpoints with a leading zero."""
        return np.concatenate([[0.0], self.breakpoints])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def __len__(self) -> int:
        return int(self.breakpoints.size)

    @classmethod
    def uniform(cls, capacity: float, step: float) -> "BucketSpec":
        """Equal-width buckets up to ``capacity`` (last bucket absorbs the remainder)."""
        if capacity <= 0 or step <= 0:
            raise ParameterError("Capacity and bucket step must be positive")
        n = max(1, int(np.floor(capacity / step + 1e-9)))
        points = step * np.arange(1, n + 1, dtype=float)
        points[-1] = capacity
        return cls(points)


class CombineMode(Enum):
    SUM = "sum"
    MAX = "max"


@dataclass(frozen=True)
class BidPriceTable:
    """
    Unit bid prices over buckets x DCPs for one capacity dimension.

    Attributes:
        dimension: "weight" (per kg) or "volume" (per m³)
        buckets: Capacity breakpoints
        dcps: Days-prior checkpoints, one column each
        values: Array of shape (len(buckets), len(dcps))
        source: "optimal" or "data_driven"
        departure_index: Flight the table belongs to
    """

    dimension: str
    buckets: BucketSpec
    dcps: Tuple[int, ...]
    values: np.ndarray
    source: str = "data_driven"
    departure_index: int = 0

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "dcps", tuple(int(d) for d in self.dcps))
        if values.shape != (len(self.buckets), len(self.dcps)):
            raise ParameterError(
                f"Table shape {values.shape} does not match "
                f"{len(self.buckets)} buckets x {len(self.dcps)} DCPs"
            )
        if np.any(values < 0):
            raise ParameterError("Bid prices must be non-negative")
        if self.dimension not in ("weight", "volume"):
            raise ParameterError(f"Unknown dimension: {self.dimension}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def column(self, dcp: int) -> np.ndarray:
        try:
            return self.values[:, self.dcps.index(int(dcp))]
        except ValueError:
            raise ParameterError(f"DCP {dcp} not in table DCPs {self.dcps}") from None

    @classmethod
    def zeros(
        cls, dimension: str, buckets: BucketSpec, dcps: Sequence[int], departure_index: int = 0
    ) -> "BidPriceTable":
        return cls(
            dimension,
            buckets,
            tuple(dcps),
            np.zeros((len(buckets), len(dcps))),
            source="zero",
            departure_index=departure_index,
        )


def _check_remaining(table: BidPriceTable, remaining: float) -> float:
    capacity = table.buckets.capacity
    if remaining < -_RANGE_TOL or remaining > capacity * (1 + _RANGE_TOL) + _RANGE_TOL:
        raise CapacityRangeError(
            f"Remaining {remaining} outside [0, {capacity}] for {table.dimension}"
        )
    return min(max(remaining, 0.0), capacity)


def unit_bid_at(table: BidPriceTable, remaining: float, dcp: int) -> float:
    """Unit bid price of the bucket containing ``remaining``."""
    remaining = _check_remaining(table, remaining)
    k = int(np.searchsorted(table.buckets.breakpoints, remaining, side="left"))
    return float(table.column(dcp)[k])


def total_bid(table: BidPriceTable, remaining: float, requested: float, dcp: int) -> float:
    """
    Total bid price of consuming ``requested`` out of ``remaining``.

    Raises:
        InsufficientCapacityError: If requested exceeds remaining
    """
    if requested <= 0:
        raise ParameterError(f"Requested quantity must be positive, got {requested}")
    remaining = _check_remaining(table, remaining)
    if requested > remaining * (1 + _RANGE_TOL) + _RANGE_TOL:
        raise InsufficientCapacityError(
            f"Requested {requested} exceeds remaining {remaining} ({table.dimension})"
        )
    low = max(remaining - requested, 0.0)
    edges = table.buckets.edges
    overlap = np.clip(
        np.minimum(remaining, edges[1:]) - np.maximum(low, edges[:-1]), 0.0, None
    )
    return float(overlap @ table.column(dcp))


def combine(total_w: float, total_v: float, mode: CombineMode) -> float:
    """Total bid price of a request from its weight and volume parts."""
    if total_w < 0 or total_v < 0:
        raise ParameterError("Total bid prices must be non-negative")
    if CombineMode(mode) is CombineMode.SUM:
        return total_w + total_v
    return max(total_w, total_v)


@dataclass
class CapacityState:
    """
    Remaining capacity of one flight.

    Attributes:
        weight_kg: Remaining weight capacity
        volume_m3: Remaining volume capacity, or None when volume is not tracked
    """

    weight_kg: float
    volume_m3: Optional[float] = None

    def fits(self, request: ShipmentRequest, unit_kg: float) -> bool:
        if request.rated_weight_kg(unit_kg) > self.weight_kg + _RANGE_TOL:
            return False
        return self.volume_m3 is None or request.volume_m3 <= self.volume_m3 + _RANGE_TOL

    def consume(self, request: ShipmentRequest, unit_kg: float) -> None:
        self.weight_kg = max(0.0, self.weight_kg - request.rated_weight_kg(unit_kg))
        if self.volume_m3 is not None:
            self.volume_m3 = max(0.0, self.volume_m3 - request.volume_m3)


def quote_price(
    request: ShipmentRequest,
    tables: Sequence[BidPriceTable],
    mode: CombineMode,
    alpha: float,
    p0: float,
    state: CapacityState,
    unit_kg: float,
    dcp: int,
) -> float:
    """
    Per-unit price for a request: max(p0, alpha + total bid / batch units).

    Args:
        request: Incoming shipment
        tables: One weight table, optionally followed by a volume table
        mode: How weight and volume totals combine
        alpha: Mean WTP per unit at this time
        p0: Minimal price per unit at this time
        state: Remaining capacity
        unit_kg: Weight of one pricing unit
        dcp: DCP column to read

    Raises:
        InsufficientCapacityError: If the request does not fit either dimension
    """
    if not state.fits(request, unit_kg):
        raise InsufficientCapacityError("Request does not fit remaining capacity")
    totals = {"weight": 0.0, "volume": 0.0}
    for table in tables:
        if table.dimension == "weight":
            totals["weight"] = total_bid(
                table, state.weight_kg, request.rated_weight_kg(unit_kg), dcp
            )
        elif state.volume_m3 is not None:
            totals["volume"] = total_bid(table, state.volume_m3, request.volume_m3, dcp)
    if len(tables) == 1:
        total = totals[tables[0].dimension]
    else:
        total = combine(totals["weight"], totals["volume"], mode)
    return max(p0, alpha + total / request.batch_units)
