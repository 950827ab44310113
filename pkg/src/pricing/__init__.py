from .abstract import PricingPolicy
from .bid_table import (
    BidPriceTable,
    BucketSpec,
    CapacityState,
    CombineMode,
    combine,
    quote_price,
    total_bid,
    unit_bid_at,
)

__all__ = [
    "BidPriceTable",
    "BucketSpec",
    "CapacityState",
    "CombineMode",
    "PricingPolicy",
    "combine",
    "quote_price",
    "total_bid",
    "unit_bid_at",
]
