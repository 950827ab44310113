from ...market import DemandParams, ShipmentRequest
from ...optimal import ValueTableCache, optimal_policy_price
from ..abstract import PricingPolicy
from ..bid_table import CapacityState


class OptimalPolicy(PricingPolicy):
    """
    Prices each request with the exact bid prices of the weight dynamic program.

    The quote is alpha(t) plus the average of the k unit bid prices the batch
    would consume one step later, floored at p0(t). When the capacity state
    tracks volume, requests that do not fit the volume are rejected, but
    volume never adds to the price.
    """

    source = "optimal"

    def __init__(
        self, params: DemandParams, cache: ValueTableCache, name: str = "optimal"
    ) -> None:
        super().__init__(params, name)
        self.cache = cache

    def prepare(self, departure_index: int) -> None:
        self.cache.get(departure_index)

    def quote(
        self, request: ShipmentRequest, state: CapacityState, departure_index: int
    ) -> float:
        _, bids = self.cache.get(departure_index)
        x = int(round(state.weight_kg / self.params.unit_kg))
        price = optimal_policy_price(
            x,
            request.arrival_step,
            request.batch_units,
            bids,
            self.params.alpha_at(request.days_prior),
        )
        return max(self.params.p0_at(request.days_prior), price)
