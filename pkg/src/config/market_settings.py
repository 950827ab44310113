class MarketConfig:
    """Standard-preset market parameters; vectors are indexed by days prior d = 1..10."""

    HORIZON_DAYS: int = 10
    # Fine enough that the busiest step stays under MAX_STEP_PROBABILITY
    STEPS_PER_DAY: int = 120
    UNIT_KG: float = 50.0
    # Rising toward departure ("late" demand); about 40 requests per flight
    # over the year, so 10,000 kg binds in the peak season and not in the trough
    LAMBDA_BY_DP = (2.7, 2.6, 2.2, 1.9, 1.7, 1.5, 1.3, 1.1, 0.9, 0.6)
    # Mean WTP per 50-kg unit, highest close to departure
    ALPHA_BY_DP = (190.0, 180.0, 170.0, 160.0, 150.0, 140.0, 130.0, 120.0, 110.0, 100.0)
    DOW_FACTORS = (0.8, 1.1, 1.0, 0.95, 1.05, 1.1, 0.8)
    SEASONALITY_BASE: float = 2.5
    SEASONALITY_AMPLITUDE: float = 1.0
    SEASONALITY_PERIOD: float = 52.0
    WEIGHT_MEAN_KG: float = 793.474
    WEIGHT_SD_KG: float = 942.37
    INVDENSITY_MEAN: float = 0.00581
    INVDENSITY_SD: float = 0.00338
    MAX_STEP_PROBABILITY: float = 0.1
