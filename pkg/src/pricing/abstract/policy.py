"""
Abstract base class for pricing policies used by the flight simulator.
A policy turns an incoming shipment request and the flight's remaining capacity
into a per-unit price quote. Subclasses decide where bid prices come from
(exact dynamic program, estimated tables, or none at all).
"""

from abc import ABC, abstractmethod
from typing import Optional

from ...market import DemandParams, ShipmentRequest
from ..bid_table import CapacityState


class PricingPolicy(ABC):
    """
    Base policy that gates requests on capacity before asking for a quote.

    Attributes:
        params: Market parameters (alpha, p0 and the unit size come from here)
        name: Label used in reports
        source: "optimal" or "data_driven"
    """

    source = "abstract"

    def __init__(self, params: DemandParams, name: str) -> None:
        """
        Initialize policy with market parameters.

        Args:
            params: Market parameters
            name: Label used in reports
        """
        self.params = params
        self.name = name

    def offer(
        self, request: ShipmentRequest, state: CapacityState, departure_index: int
    ) -> Optional[float]:
        """
        Quote a request, or None when it does not fit (full accept/reject).

        Args:
            request: Incoming shipment
            state: Remaining capacity before the request
            departure_index: Flight being sold

        Returns:
            Optional[float]: Per-unit price, None if rejected for capacity
        """
        if not state.fits(request, self.params.unit_kg):
            return None
        return self.quote(request, state, departure_index)

    @abstractmethod
    def prepare(self, departure_index: int) -> None:
        """
        Make sure bid prices for a flight exist before it is simulated.
        Must be implemented by subclasses; implementations cache per flight.
        """
        pass

    @abstractmethod
    def quote(
        self, request: ShipmentRequest, state: CapacityState, departure_index: int
    ) -> float:
        """
        Per-unit price for a request that fits.

        Args:
            request: Incoming shipment
            state: Remaining capacity
            departure_index: Flight being sold

        Returns:
            float: Price per capacity unit
        """
        pass
