import unittest

import numpy as np
import pytest

from src.errors import CapacityRangeError, InsufficientCapacityError, ParameterError
from src.market import ShipmentRequest
from src.optimal import OptimalBidTable
from src.pricing import (
    BidPriceTable,
    BucketSpec,
    CapacityState,
    CombineMode,
    combine,
    quote_price,
    total_bid,
    unit_bid_at,
)


def make_table(values, dimension: str = "weight", dcps=(3,)) -> BidPriceTable:
    values = np.asarray(values, dtype=float).reshape(-1, len(dcps))
    return BidPriceTable(dimension, BucketSpec(np.array([100.0, 200.0, 400.0])), dcps, values)


def request(weight_kg: float = 100.0, volume_m3: float = 0.6, units: int = 2) -> ShipmentRequest:
    return ShipmentRequest(
        arrival_step=30,
        days_prior=3,
        weight_kg=weight_kg,
        volume_m3=volume_m3,
        batch_units=units,
        accept_draw=0.5,
    )


class TestBucketSpec(unittest.TestCase):
    def test_edges_and_widths(self):
        spec = BucketSpec(np.array([100.0, 200.0, 400.0]))
        self.assertEqual(spec.edges.tolist(), [0.0, 100.0, 200.0, 400.0])
        self.assertEqual(spec.widths.tolist(), [100.0, 100.0, 200.0])
        self.assertEqual(spec.capacity, 400.0)
        self.assertEqual(len(spec), 3)

    def test_uniform(self):
        self.assertEqual(BucketSpec.uniform(10_000.0, 500.0).breakpoints.size, 20)
        self.assertEqual(BucketSpec.uniform(60.0, 3.0).capacity, 60.0)

    def test_uniform_last_bucket_absorbs_remainder(self):
        spec = BucketSpec.uniform(1000.0, 300.0)
        self.assertEqual(spec.breakpoints.tolist(), [300.0, 600.0, 1000.0])

    def test_invalid(self):
        with self.assertRaises(ParameterError):
            BucketSpec(np.array([100.0, 100.0]))
        with self.assertRaises(ParameterError):
            BucketSpec(np.array([0.0, 100.0]))
        with self.assertRaises(ParameterError):
            BucketSpec(np.array([]))
        with self.assertRaises(ParameterError):
            BucketSpec.uniform(100.0, 0.0)


class TestBidPriceTable(unittest.TestCase):
    def test_shape_must_match(self):
        with self.assertRaises(ParameterError):
            BidPriceTable("weight", BucketSpec(np.array([1.0, 2.0])), (2, 1), np.zeros((2, 1)))

    def test_values_non_negative(self):
        with self.assertRaises(ParameterError):
            make_table([1.0, -0.5, 1.0])

    def test_dimension(self):
        with self.assertRaises(ParameterError):
            make_table([1.0, 1.0, 1.0], dimension="length")

    def test_unknown_dcp(self):
        with self.assertRaises(ParameterError):
            make_table([1.0, 1.0, 1.0]).column(7)

    def test_zeros(self):
        table = BidPriceTable.zeros("volume", BucketSpec.uniform(60.0, 3.0), [2, 1], 9)
        self.assertEqual(table.values.shape, (20, 2))
        self.assertEqual(table.source, "zero")
        self.assertEqual(table.departure_index, 9)


class TestUnitBid:
    @pytest.fixture
    def table(self) -> BidPriceTable:
        return make_table([25.0, 20.0, 5.0])

    def test_inside_segment(self, table) -> None:
        assert unit_bid_at(table, 150.0, 3) == 20.0

    def test_closed_upper_end(self, table) -> None:
        assert unit_bid_at(table, 200.0, 3) == 20.0
        assert unit_bid_at(table, 100.0, 3) == 25.0

    def test_empty_flight_uses_first_bucket(self, table) -> None:
        assert unit_bid_at(table, 0.0, 3) == 25.0

    def test_out_of_range(self, table) -> None:
        with pytest.raises(CapacityRangeError):
            unit_bid_at(table, 401.0, 3)
        with pytest.raises(CapacityRangeError):
            unit_bid_at(table, -1.0, 3)


class TestTotalBid:
    @pytest.fixture
    def table(self) -> BidPriceTable:
        return make_table([25.0, 20.0, 5.0])

    def test_spans_two_buckets(self, table) -> None:
        assert total_bid(table, 250.0, 100.0, 3) == pytest.approx(1250.0)

    def test_inside_one_bucket(self, table) -> None:
        assert total_bid(table, 380.0, 30.0, 3) == pytest.approx(150.0)

    def test_full_capacity(self, table) -> None:
        assert total_bid(table, 400.0, 400.0, 3) == pytest.approx(25 * 100 + 20 * 100 + 5 * 200)

    def test_request_exceeds_remaining(self, table) -> None:
        with pytest.raises(InsufficientCapacityError):
            total_bid(table, 100.0, 150.0, 3)

    def test_non_positive_request(self, table) -> None:
        with pytest.raises(ParameterError):
            total_bid(table, 100.0, 0.0, 3)

    def test_split_requests_add_up(self) -> None:
        rng = np.random.default_rng(12)
        table = make_table(rng.uniform(0, 30, size=3))
        for _ in range(500):
            remaining = float(rng.uniform(1.0, 400.0))
            first = float(rng.uniform(0.0, remaining))
            second = float(rng.uniform(0.0, remaining - first))
            if first <= 0 or second <= 0:
                continue
            whole = total_bid(table, remaining, first + second, 3)
            parts = total_bid(table, remaining, first, 3) + total_bid(
                table, remaining - first, second, 3
            )
            assert whole == pytest.approx(parts, rel=1e-9, abs=1e-9)

    def test_single_segment_ignores_remaining(self) -> None:
        table = BidPriceTable("volume", BucketSpec(np.array([60.0])), (1,), np.array([[7.0]]))
        for remaining in (5.0, 30.0, 60.0):
            assert total_bid(table, remaining, 5.0, 1) == pytest.approx(35.0)


class TestCombine:
    def test_sum(self) -> None:
        assert combine(100.0, 40.0, CombineMode.SUM) == 140.0

    def test_max(self) -> None:
        assert combine(100.0, 40.0, CombineMode.MAX) == 100.0

    def test_zero(self) -> None:
        for mode in CombineMode:
            assert combine(0.0, 0.0, mode) == 0.0

    def test_mode_by_value(self) -> None:
        assert combine(3.0, 4.0, "max") == 4.0

    def test_negative(self) -> None:
        with pytest.raises(ParameterError):
            combine(-1.0, 0.0, CombineMode.SUM)

    def test_sum_dominates_max(self) -> None:
        rng = np.random.default_rng(1)
        for a, b in rng.uniform(0, 1000, size=(200, 2)):
            assert combine(a, b, CombineMode.SUM) >= combine(a, b, CombineMode.MAX) >= max(a, b)


class TestCapacityState:
    def test_weight_only(self) -> None:
        state = CapacityState(150.0)
        assert state.fits(request(units=3), 50.0)
        assert not state.fits(request(units=4), 50.0)
        state.consume(request(units=2), 50.0)
        assert state.weight_kg == 50.0
        assert state.volume_m3 is None

    def test_volume_gate(self) -> None:
        state = CapacityState(1000.0, 1.0)
        assert not state.fits(request(volume_m3=1.5), 50.0)
        state.consume(request(volume_m3=0.4), 50.0)
        assert state.volume_m3 == pytest.approx(0.6)


def quote(tables, state, alpha=10.0, p0=0.0, mode=CombineMode.SUM, req=None) -> float:
    """Quote for a three-days-prior request with 50 kg units"""
    return quote_price(req or request(), tables, mode, alpha, p0, state, 50.0, 3)


class TestQuotePrice:
    @pytest.fixture
    def weight(self) -> BidPriceTable:
        return make_table([25.0, 20.0, 5.0])

    @pytest.fixture
    def volume(self) -> BidPriceTable:
        return BidPriceTable(
            "volume", BucketSpec.uniform(60.0, 3.0), (3,), np.full((20, 1), 40.0)
        )

    def test_zero_tables_quote_alpha(self) -> None:
        table = make_table([0.0, 0.0, 0.0])
        assert quote([table], CapacityState(400.0), alpha=80.0) == 80.0

    def test_unit_granular_table(self) -> None:
        """Two units with bids 6 and 4 one step later: 10 + (4 + 6) / 2"""
        bid = np.zeros((4, 2))
        bid[2, 0], bid[3, 0] = 6.0, 4.0
        table = OptimalBidTable(bid).to_bid_table(0, 50.0)
        price = quote_price(
            request(), [table], CombineMode.SUM, 10.0, 0.0, CapacityState(150.0), 50.0, 0
        )
        assert price == pytest.approx(15.0)

    def test_weight_and_volume(self, weight) -> None:
        volume = BidPriceTable.zeros("volume", BucketSpec.uniform(60.0, 3.0), [3])
        price = quote([weight, volume], CapacityState(250.0, 30.0))
        assert price == pytest.approx(10.0 + 1250.0 / 2)

    def test_sum_quotes_at_least_max(self, weight, volume) -> None:
        state = CapacityState(250.0, 30.0)
        quotes = {
            mode: quote([weight, volume], state, mode=mode, req=request(volume_m3=2.0))
            for mode in CombineMode
        }
        assert quotes[CombineMode.SUM] == pytest.approx(10.0 + (1250.0 + 80.0) / 2)
        assert quotes[CombineMode.MAX] == pytest.approx(10.0 + 1250.0 / 2)
        assert quotes[CombineMode.SUM] >= quotes[CombineMode.MAX]

    def test_untracked_volume_adds_nothing(self, weight, volume) -> None:
        assert quote([weight, volume], CapacityState(250.0)) == pytest.approx(635.0)

    def test_minimal_price_floor(self) -> None:
        table = make_table([0.0, 0.0, 0.0])
        assert quote([table], CapacityState(400.0), p0=30.0) == 30.0

    def test_never_below_alpha(self, weight) -> None:
        rng = np.random.default_rng(0)
        for remaining in rng.uniform(100.0, 400.0, size=50):
            state = CapacityState(float(remaining))
            assert quote([weight], state, alpha=55.0, mode=CombineMode.MAX) >= 55.0

    def test_does_not_fit(self, weight) -> None:
        with pytest.raises(InsufficientCapacityError):
            quote([weight], CapacityState(50.0))
