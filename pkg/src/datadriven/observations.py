"""
Observation building: ex-post greedy bid-price proxies from booking history.

For every flight and DCP the bookings made at or after that DCP are sorted by
unit price, highest first, and stacked onto the last units of capacity. Unsold
capacity is padded at price zero. Cumulative revenue is interpolated at each
capacity breakpoint and differenced into one average unit price per bucket.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config import PricingConfig
from ..errors import DataError, InvariantViolation, ParameterError
from ..pricing import BucketSpec
from .proration import ProrationMode, prorate

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = [
    "flight_id",
    "departure_index",
    "days_prior",
    "revenue",
    "weight_kg",
    "volume_m3",
]
OBSERVATION_COLUMNS = [
    "departure_index",
    "dcp",
    "bucket_index",
    "breakpoint",
    "proxy",
    "cum_revenue",
    "dimension",
    "mode",
]


@dataclass(frozen=True)
class BookingRecord:
    """
    One historical booking.

    Attributes:
        flight_id: Flight label
        departure_index: Departure date index of the flight
        days_prior: Days before departure the booking was made
        revenue: Total revenue of the booking
        weight_kg: Shipment weight
        volume_m3: Shipment volume, None in weight-only histories
    """

    flight_id: str
    departure_index: int
    days_prior: int
    revenue: float
    weight_kg: float
    volume_m3: Optional[float] = None

    def __post_init__(self) -> None:
        if self.revenue < 0:
            raise ParameterError(f"Booking revenue must be >= 0, got {self.revenue}")
        if self.weight_kg <= 0:
            raise ParameterError(f"Booking weight must be > 0, got {self.weight_kg}")


@dataclass(frozen=True)
class Observation:
    """
    One training row: unit bid-price proxy of a bucket at a DCP for a flight.

    Attributes:
        bucket_index: 1-based bucket index k
        dcp: Days-prior checkpoint
        departure_index: Flight's departure index
        proxy: Average unit price of the bucket segment
        breakpoint: Upper breakpoint b_k of the bucket
        cum_revenue: Interpolated cumulative revenue at b_k
    """

    bucket_index: int
    dcp: int
    departure_index: int
    proxy: float
    breakpoint: float
    cum_revenue: float = 0.0


@dataclass(frozen=True)
class PricedQuantity:
    """Unit price and quantity of one booking in one capacity dimension."""

    departure_index: int
    days_prior: int
    unit_price: float
    quantity: float


def records_for_dimension(
    history: Iterable[BookingRecord],
    dimension: str,
    mode: ProrationMode = ProrationMode.NONE,
    factor: float = PricingConfig.INVERSE_DENSITY_FACTOR,
) -> List[PricedQuantity]:
    """
    Unit prices per booking for one dimension after the chosen proration.

    Records without a positive quantity in the dimension are skipped.
    """
    if dimension not in ("weight", "volume"):
        raise ParameterError(f"Unknown dimension: {dimension}")
    rows: List[PricedQuantity] = []
    for record in history:
        volume = record.volume_m3 if record.volume_m3 is not None else 0.0
        quantity = record.weight_kg if dimension == "weight" else volume
        if quantity <= 0:
            continue
        split = prorate(record.revenue, record.weight_kg, volume, mode, factor)
        revenue = split.r_w if dimension == "weight" else split.r_v
        rows.append(
            PricedQuantity(
                record.departure_index, record.days_prior, revenue / quantity, quantity
            )
        )
    return rows


def _slice_cumulative(
    bookings: Sequence[PricedQuantity], buckets: BucketSpec
) -> np.ndarray:
    """Interpolated cumulative revenue at each breakpoint for one (flight, DCP)."""
    if bookings:
        # Price descending, then larger quantity, then earlier booking
        ordered = sorted(
            bookings, key=lambda b: (-b.unit_price, -b.quantity, -b.days_prior)
        )
        prices = np.array([b.unit_price for b in ordered])
        quantities = np.array([b.quantity for b in ordered])
    else:
        prices = np.zeros(0)
        quantities = np.zeros(0)
    pad = max(0.0, buckets.capacity - float(quantities.sum()))
    prices = np.append(prices, 0.0)
    quantities = np.append(quantities, pad)

    cum_q = np.concatenate([[0.0], np.cumsum(quantities)])
    cum_r = np.concatenate([[0.0], np.cumsum(prices * quantities)])
    b = buckets.breakpoints
    lower = np.searchsorted(cum_q, b, side="right") - 1
    upper = np.minimum(np.searchsorted(cum_q, b, side="left"), cum_q.size - 1)
    width = cum_q[upper] - cum_q[lower]
    factor = np.divide(b - cum_q[lower], width, out=np.zeros_like(b), where=width > 0)
    return cum_r[lower] + factor * (cum_r[upper] - cum_r[lower])


def proxies_from_cumulative(cum_revenue: Sequence[float], buckets: BucketSpec) -> np.ndarray:
    """
    Average unit price of each bucket segment from cumulative revenue.

    Raises:
        InvariantViolation: If cumulative revenue decreases
    """
    cum = np.asarray(cum_revenue, dtype=float)
    if cum.shape != buckets.breakpoints.shape:
        raise ParameterError("Cumulative revenue must have one value per breakpoint")
    increments = np.diff(cum, prepend=0.0)
    scale = max(1.0, float(np.abs(cum).max(initial=0.0)))
    if np.any(increments < -1e-9 * scale):
        raise InvariantViolation("Cumulative revenue decreases across breakpoints")
    return np.clip(increments, 0.0, None) / buckets.widths


def default_buckets(capacity: float, step: float) -> BucketSpec:
    """Equal-step breakpoints up to ``capacity``."""
    return BucketSpec.uniform(capacity, step)


def build_observations(
    history: Iterable[BookingRecord],
    dcps: Sequence[int],
    buckets: BucketSpec,
    dimension: str = "weight",
    mode: ProrationMode = ProrationMode.NONE,
    factor: float = PricingConfig.INVERSE_DENSITY_FACTOR,
    departures: Optional[Iterable[int]] = None,
) -> List[Observation]:
    """
    Bucketed unit bid-price proxies for every flight and DCP.

    Args:
        history: Booking records of any number of flights
        dcps: DCPs in descending order
        buckets: Capacity breakpoints of the dimension
        dimension: "weight" or "volume"
        mode: Which revenue each dimension sees
        factor: Standard inverse density factor used by proration
        departures: Flights to cover; flights with no bookings get zero rows

    Returns:
        List[Observation]: Ordered by flight, then DCP, then bucket
    """
    priced = records_for_dimension(history, dimension, mode, factor)
    return build_from_priced(priced, dcps, buckets, departures)


def build_from_priced(
    priced: Iterable[PricedQuantity],
    dcps: Sequence[int],
    buckets: BucketSpec,
    departures: Optional[Iterable[int]] = None,
) -> List[Observation]:
    """build_observations over already priced (unit price, quantity) rows."""
    if list(dcps) != sorted(dcps, reverse=True):
        raise ParameterError(f"DCPs must be sorted descending, got {list(dcps)}")
    by_flight: Dict[int, List[PricedQuantity]] = defaultdict(list)
    for booking in priced:
        if booking.quantity <= 0:
            raise DataError(
                f"Booking on flight {booking.departure_index} has non-positive quantity"
            )
        by_flight[booking.departure_index].append(booking)
    flights = sorted(set(by_flight) | set(departures or ()))

    observations: List[Observation] = []
    for flight in flights:
        bookings = by_flight.get(flight, [])
        for dcp in dcps:
            window = [b for b in bookings if b.days_prior <= dcp]
            cum = _slice_cumulative(window, buckets)
            proxies = proxies_from_cumulative(cum, buckets)
            for k, (point, proxy, value) in enumerate(
                zip(buckets.breakpoints, proxies, cum), start=1
            ):
                observations.append(
                    Observation(k, int(dcp), flight, float(proxy), float(point), float(value))
                )
    logger.debug("Built %d observations over %d flights", len(observations), len(flights))
    return observations


def observations_to_frame(
    observations: Sequence[Observation], dimension: str = "weight", mode: str = "none"
) -> pd.DataFrame:
    frame = pd.DataFrame(
        {
            "departure_index": [o.departure_index for o in observations],
            "dcp": [o.dcp for o in observations],
            "bucket_index": [o.bucket_index for o in observations],
            "breakpoint": [o.breakpoint for o in observations],
            "proxy": [o.proxy for o in observations],
            "cum_revenue": [o.cum_revenue for o in observations],
        }
    )
    frame["dimension"] = dimension
    frame["mode"] = mode
    return frame[OBSERVATION_COLUMNS]


def write_observations_csv(
    observations: Sequence[Observation], path: Path, dimension: str, mode: str
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    observations_to_frame(observations, dimension, mode).to_csv(path, index=False)
    return path


def read_observations_csv(path: Path) -> Tuple[List[Observation], str, str]:
    """
    Load observations written by write_observations_csv.

    Returns:
        Tuple[List[Observation], str, str]: rows, dimension and proration mode
    """
    frame = _read_csv(path, OBSERVATION_COLUMNS)
    rows = [
        Observation(
            int(r.bucket_index),
            int(r.dcp),
            int(r.departure_index),
            float(r.proxy),
            float(r.breakpoint),
            float(r.cum_revenue),
        )
        for r in frame.itertuples(index=False)
    ]
    dimension = str(frame["dimension"].iloc[0]) if len(frame) else "weight"
    mode = str(frame["mode"].iloc[0]) if len(frame) else "none"
    return rows, dimension, mode


def history_to_frame(history: Sequence[BookingRecord]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "flight_id": [r.flight_id for r in history],
            "departure_index": [r.departure_index for r in history],
            "days_prior": [r.days_prior for r in history],
            "revenue": [r.revenue for r in history],
            "weight_kg": [r.weight_kg for r in history],
            "volume_m3": [r.volume_m3 for r in history],
        },
        columns=HISTORY_COLUMNS,
    )


def write_history_csv(history: Sequence[BookingRecord], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    history_to_frame(history).to_csv(path, index=False)
    return path


def read_history_csv(path: Path) -> List[BookingRecord]:
    """Load a booking history CSV; an empty volume cell means weight-only."""
    frame = _read_csv(path, HISTORY_COLUMNS)
    try:
        return [
            BookingRecord(
                str(r.flight_id),
                int(r.departure_index),
                int(r.days_prior),
                float(r.revenue),
                float(r.weight_kg),
                None if pd.isna(r.volume_m3) else float(r.volume_m3),
            )
            for r in frame.itertuples(index=False)
        ]
    except (ValueError, ParameterError) as e:
        raise DataError(f"Invalid booking row in {path}: {e}") from e


def _read_csv(path: Path, columns: Sequence[str]) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"File not found: {path}")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"Could not parse {path}: {e}") from e
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise DataError(f"{path} is missing columns: {', '.join(missing)}")
    return frame
