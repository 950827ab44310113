from .commands import eval_baseline, eval_scenarios
from .parser import create_cli

__all__ = [
    "create_cli",
    "eval_baseline",
    "eval_scenarios",
]
