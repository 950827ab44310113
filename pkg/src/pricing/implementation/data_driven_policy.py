import threading
from typing import Dict, List, Optional, Sequence

from ...datadriven import MlpModel, bid_table
from ...errors import ParameterError
from ...market import DemandParams, ShipmentRequest
from ..abstract import PricingPolicy
from ..bid_table import BidPriceTable, BucketSpec, CapacityState, CombineMode, quote_price


class DataDrivenPolicy(PricingPolicy):
    """
    Prices requests with bid-price tables predicted by trained estimators.

    A weight model is required; a volume model adds a second table whose total
    bid price is combined with the weight total (sum or max).
    """

    source = "data_driven"

    def __init__(
        self,
        params: DemandParams,
        weight_model: MlpModel,
        weight_buckets: BucketSpec,
        dcps: Sequence[int],
        volume_model: Optional[MlpModel] = None,
        volume_buckets: Optional[BucketSpec] = None,
        mode: CombineMode = CombineMode.SUM,
        name: str = "data_driven",
    ) -> None:
        super().__init__(params, name)
        if volume_model is not None and volume_buckets is None:
            raise ParameterError("A volume model needs volume buckets")
        self.weight_model = weight_model
        self.weight_buckets = weight_buckets
        self.volume_model = volume_model
        self.volume_buckets = volume_buckets
        self.dcps = tuple(dcps)
        self.mode = CombineMode(mode)
        self._tables: Dict[int, List[BidPriceTable]] = {}
        self._lock = threading.Lock()

    def tables_for(self, departure_index: int) -> List[BidPriceTable]:
        """Weight table, then the volume table when a volume model is set."""
        with self._lock:
            cached = self._tables.get(departure_index)
        if cached is not None:
            return cached
        tables = [bid_table(self.weight_model, self.weight_buckets, self.dcps, departure_index)]
        if self.volume_model is not None:
            tables.append(
                bid_table(self.volume_model, self.volume_buckets, self.dcps, departure_index)
            )
        with self._lock:
            return self._tables.setdefault(departure_index, tables)

    def prepare(self, departure_index: int) -> None:
        self.tables_for(departure_index)

    def quote(
        self, request: ShipmentRequest, state: CapacityState, departure_index: int
    ) -> float:
        return quote_price(
            request,
            self.tables_for(departure_index),
            self.mode,
            self.params.alpha_at(request.days_prior),
            self.params.p0_at(request.days_prior),
            state,
            self.params.unit_kg,
            request.days_prior,
        )


class ZeroBidPolicy(PricingPolicy):
    """Ignores opportunity cost: every request is quoted max(p0, alpha)."""

    source = "zero_bid"

    def __init__(self, params: DemandParams, name: str = "zero_bid") -> None:
        super().__init__(params, name)

    def prepare(self, departure_index: int) -> None:
        pass

    def quote(
        self, request: ShipmentRequest, state: CapacityState, departure_index: int
    ) -> float:
        return max(
            self.params.p0_at(request.days_prior), self.params.alpha_at(request.days_prior)
        )
