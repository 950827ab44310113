"""
Revenue proration between the weight and volume capacity dimensions.

Weight-dominated proration attributes revenue to weight in proportion to
density up to the standard density, and all of it to weight beyond; the
volume-dominated rule mirrors it for volume.
"""

from dataclasses import dataclass
from enum import Enum

from ..config import PricingConfig
from ..errors import ParameterError


class ProrationMode(Enum):
    """How historical revenue is fed to each capacity dimension."""

    NONE = "none"
    WEIGHT_DOMINATED = "weight_dominated"
    VOLUME_DOMINATED = "volume_dominated"


@dataclass(frozen=True)
class ProratedRecord:
    """Revenue split of one booking; r_w + r_v equals the original revenue."""

    r_w: float
    r_v: float
    chargeable_weight: float


def chargeable_weight(
    w: float, v: float, factor: float = PricingConfig.INVERSE_DENSITY_FACTOR
) -> float:
    """max(w, v / factor): the weight a shipment is charged for, in kg."""
    if w <= 0 or v < 0:
        raise ParameterError(f"Need w > 0 and v >= 0, got w={w}, v={v}")
    return max(w, v / factor)


def _split(r: float, share: float) -> tuple:
    # Two subtractions from r make the pair sum back to r exactly
    rest = r - r * share
    return r - rest, rest


def prorate(
    r: float,
    w: float,
    v: float,
    mode: ProrationMode,
    factor: float = PricingConfig.INVERSE_DENSITY_FACTOR,
) -> ProratedRecord:
    """
    Split booking revenue between weight and volume.

    Args:
        r: Booking revenue
        w: Shipment weight in kg
        v: Shipment volume in m³
        mode: Proration rule
        factor: Standard inverse density factor in m³/kg

    Returns:
        ProratedRecord: Revenue attributed to each dimension

    Raises:
        ParameterError: On negative revenue or invalid quantities
    """
    if r < 0:
        raise ParameterError(f"Revenue must be non-negative, got {r}")
    cw = chargeable_weight(w, v, factor)
    mode = ProrationMode(mode)
    if mode is ProrationMode.NONE:
        # A pure-weight record carries nothing into the volume dimension
        return ProratedRecord(r_w=r, r_v=r if v > 0 else 0.0, chargeable_weight=cw)
    if mode is ProrationMode.WEIGHT_DOMINATED:
        r_w, r_v = _split(r, min(1.0, w / cw))
        return ProratedRecord(r_w=r_w, r_v=r_v, chargeable_weight=cw)
    r_v, r_w = _split(r, min(1.0, (v / factor) / cw))
    return ProratedRecord(r_w=r_w, r_v=r_v, chargeable_weight=cw)
