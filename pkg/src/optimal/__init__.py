from .batch import BatchDist, batch_cap, batch_dist_from_weight
from .value_function import (
    OptimalBidTable,
    ValueTable,
    ValueTableCache,
    backward_induction,
    bid_prices,
    export_tables_csv,
    optimal_policy_price,
    optimal_price,
    solve_value_function,
)

__all__ = [
    "BatchDist",
    "OptimalBidTable",
    "ValueTable",
    "ValueTableCache",
    "backward_induction",
    "batch_cap",
    "batch_dist_from_weight",
    "bid_prices",
    "export_tables_csv",
    "optimal_policy_price",
    "optimal_price",
    "solve_value_function",
]
