from .demand import (
    DemandParams,
    LogNormalSpec,
    ShipmentRequest,
    arrival_rate,
    batch_units_of,
    days_prior_of_step,
    flight_rng,
    lognormal_log_params,
    purchase_probability,
    sample_request,
    sample_stream,
    volume_moments,
)

__all__ = [
    "DemandParams",
    "LogNormalSpec",
    "ShipmentRequest",
    "arrival_rate",
    "batch_units_of",
    "days_prior_of_step",
    "flight_rng",
    "lognormal_log_params",
    "purchase_probability",
    "sample_request",
    "sample_stream",
    "volume_moments",
]
