"""
Exception hierarchy shared by every package in the lab.

Normal simulation outcomes (no arrival, a shipment that does not fit, a refused
quote) are return values. These exceptions signal misuse or bad inputs.
"""


class CargoRMError(Exception):
    """Base class for all errors raised by the lab."""


class ParameterError(CargoRMError, ValueError):
    """A model parameter is outside its valid domain."""


class CapacityRangeError(CargoRMError, ValueError):
    """A capacity level lies outside the range covered by a bid-price table."""


class NoCapacityError(CargoRMError):
    """Pricing was requested for a state with no remaining capacity."""


class InsufficientCapacityError(CargoRMError):
    """A request needs more capacity than remains."""


class DataError(CargoRMError):
    """Input data (history, observations, run directories) is unusable."""


class ConfigError(DataError):
    """An experiment configuration file is missing or invalid."""


class InvariantViolation(CargoRMError):
    """An internal invariant does not hold; indicates a bug, not bad input."""
