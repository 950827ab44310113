"""
Simulation of one flight's booking horizon.

A flight is a pre-drawn request stream replayed against a policy. Every
request carries its own purchase uniform, so two policies replaying the same
stream see the same customers and differ only through their quotes.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..datadriven import BookingRecord
from ..errors import InvariantViolation
from ..market import DemandParams, ShipmentRequest, purchase_probability, sample_stream
from ..pricing import CapacityState, PricingPolicy


@dataclass(frozen=True)
class FlightCapacity:
    """Capacity of one flight; volume None means weight-only."""

    weight_kg: float
    volume_m3: Optional[float] = None

    def fresh_state(self) -> CapacityState:
        return CapacityState(self.weight_kg, self.volume_m3)


@dataclass(frozen=True)
class FlightResult:
    """
    Outcome of one flight under one policy.

    Attributes:
        departure_index: Flight's departure index
        policy: Policy label
        revenue: Sum of accepted booking revenues
        bookings: Number of accepted requests
        requests: Number of arrived requests
        rejected_capacity: Requests turned away because they did not fit
        weight_load_factor: Share of weight capacity consumed
        volume_load_factor: Share of volume capacity consumed, NaN when not tracked
    """

    departure_index: int
    policy: str
    revenue: float
    bookings: int
    requests: int
    rejected_capacity: int
    weight_load_factor: float
    volume_load_factor: float = float("nan")


def flight_id(departure_index: int) -> str:
    return f"F{departure_index:04d}"


def replay_flight(
    policy: PricingPolicy,
    stream: Sequence[ShipmentRequest],
    capacity: FlightCapacity,
    departure_index: int,
) -> Tuple[FlightResult, List[BookingRecord]]:
    """
    Replay a request stream against a policy.

    Args:
        policy: Pricing policy
        stream: Requests in arrival order (largest remaining steps first)
        capacity: Capacity at horizon start
        departure_index: Flight being sold

    Returns:
        Tuple[FlightResult, List[BookingRecord]]: Flight summary and accepted bookings
    """
    params = policy.params
    policy.prepare(departure_index)
    state = capacity.fresh_state()
    bookings: List[BookingRecord] = []
    revenue = 0.0
    rejected = 0
    for request in stream:
        price = policy.offer(request, state, departure_index)
        if price is None:
            rejected += 1
            continue
        buy = purchase_probability(
            price, params.p0_at(request.days_prior), params.alpha_at(request.days_prior)
        )
        if request.accept_draw >= buy:
            continue
        booking_revenue = price * request.batch_units
        state.consume(request, params.unit_kg)
        if state.weight_kg < 0 or (state.volume_m3 is not None and state.volume_m3 < 0):
            raise InvariantViolation(f"Negative capacity on flight {departure_index}")
        revenue += booking_revenue
        bookings.append(
            BookingRecord(
                flight_id(departure_index),
                departure_index,
                request.days_prior,
                booking_revenue,
                request.weight_kg,
                request.volume_m3,
            )
        )

    volume_load = float("nan")
    if capacity.volume_m3 is not None:
        volume_load = 1.0 - state.volume_m3 / capacity.volume_m3
    result = FlightResult(
        departure_index=departure_index,
        policy=policy.name,
        revenue=revenue,
        bookings=len(bookings),
        requests=len(stream),
        rejected_capacity=rejected,
        weight_load_factor=1.0 - state.weight_kg / capacity.weight_kg,
        volume_load_factor=volume_load,
    )
    return result, bookings


def run_flight(
    policy: PricingPolicy,
    departure_index: int,
    params: DemandParams,
    capacity: FlightCapacity,
    rng: np.random.Generator,
) -> Tuple[FlightResult, List[BookingRecord]]:
    """Draw one flight's requests from ``rng`` and replay them against ``policy``."""
    stream = sample_stream(params, rng, departure_index)
    return replay_flight(policy, stream, capacity, departure_index)
