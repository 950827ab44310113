from .constants import Config
from .estimator_settings import EstimatorDefaults
from .market_settings import MarketConfig
from .pricing_settings import PricingConfig

__all__ = ["Config", "EstimatorDefaults", "MarketConfig", "PricingConfig"]
