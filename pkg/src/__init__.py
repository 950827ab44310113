"""Single-leg air cargo revenue management lab.

Exact dynamic-programming bid prices, data-driven bid prices learned from
booking history, and the simulation harness that compares them.
"""

__version__ = "0.3.0"
