from .estimator import (
    EstimatorConfig,
    FeatureConfig,
    MlpModel,
    bid_table,
    feature_matrix,
    featurize,
    loss_and_gradients,
    predict_bid,
    train,
)
from .observations import (
    BookingRecord,
    Observation,
    PricedQuantity,
    build_from_priced,
    build_observations,
    default_buckets,
    proxies_from_cumulative,
    read_history_csv,
    read_observations_csv,
    records_for_dimension,
    write_history_csv,
    write_observations_csv,
)
from .proration import ProratedRecord, ProrationMode, chargeable_weight, prorate

__all__ = [
    "BookingRecord",
    "EstimatorConfig",
    "FeatureConfig",
    "MlpModel",
    "Observation",
    "PricedQuantity",
    "ProratedRecord",
    "ProrationMode",
    "bid_table",
    "build_from_priced",
    "build_observations",
    "chargeable_weight",
    "default_buckets",
    "feature_matrix",
    "featurize",
    "loss_and_gradients",
    "predict_bid",
    "proxies_from_cumulative",
    "prorate",
    "read_history_csv",
    "read_observations_csv",
    "records_for_dimension",
    "train",
    "write_history_csv",
    "write_observations_csv",
]
