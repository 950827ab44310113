from .data_driven_policy import DataDrivenPolicy, ZeroBidPolicy
from .optimal_policy import OptimalPolicy

__all__ = ["DataDrivenPolicy", "OptimalPolicy", "ZeroBidPolicy"]
