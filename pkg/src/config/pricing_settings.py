class PricingConfig:
    # Standard air cargo inverse density factor, m³ per kg (1 t per 6 m³)
    INVERSE_DENSITY_FACTOR: float = 0.006
    BATCH_TAIL_TOLERANCE: float = 1e-4
    WEIGHT_BUCKET_KG: float = 500.0
    VOLUME_BUCKET_M3: float = 3.0
    CAPACITY_PRESETS = {
        "standard": (10_000.0, 60.0),
        "small": (1_000.0, 60.0),
    }
    DEFAULT_PRESET = "standard"
    DEFAULT_DEPARTURES: int = 365
    # Solved departures kept in memory; each holds two (C + 1) x (T + 1) arrays
    VALUE_CACHE_SIZE: int = 32
