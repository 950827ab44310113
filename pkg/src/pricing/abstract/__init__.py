from .policy import PricingPolicy

__all__ = ["PricingPolicy"]
