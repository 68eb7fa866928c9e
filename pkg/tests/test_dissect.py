import numpy as np
import pytest

from intrinsic import (
    DissectionConfig,
    EventKind,
    InsufficientEventsError,
    Mode,
    PricePoint,
    PriceSeries,
    ReturnConvention,
    Runner,
    SegmentKind,
    TimeRegressionError,
    avg_overshoot,
    coastline,
    count_dc,
    dissect,
)
from conftest import event_tuples, make_series, random_walk_series
from reference import naive_avg_overshoot, naive_count_dc, naive_dissect

FRAC = ReturnConvention.FRACTIONAL
LOG = ReturnConvention.LOGARITHMIC

# hand-traced at threshold 1% fractional: the first move from the initial
# price 100 that reaches +-1% fires at 101 (up); the reversal from the
# running high 102 fires at 100 (102->101 is only a 0.980% drop); the
# reversal from the reset low 100 fires at 103
TRACE_PRICES = [100.0, 101.0, 102.0, 101.0, 100.0, 103.0]
TRACE_EVENTS = [
    (EventKind.DIRECTIONAL_CHANGE, Mode.UP, 1000, 101.0, 1, 0),
    (EventKind.DIRECTIONAL_CHANGE, Mode.DOWN, 4000, 100.0, 4, 1),
    (EventKind.DIRECTIONAL_CHANGE, Mode.UP, 5000, 103.0, 5, 2),
]
TRACE_SEGMENTS = [
    (SegmentKind.DIRECTIONAL_CHANGE, 100.0, 101.0, 0, 1000, 0.01),
    (SegmentKind.OVERSHOOT, 101.0, 102.0, 1000, 2000, 1.0 / 101.0),
    (SegmentKind.DIRECTIONAL_CHANGE, 102.0, 100.0, 2000, 4000, 2.0 / 102.0),
    (SegmentKind.OVERSHOOT, 100.0, 100.0, 4000, 4000, 0.0),
    (SegmentKind.DIRECTIONAL_CHANGE, 100.0, 103.0, 4000, 5000, 0.03),
]


def stream_events(series, config):
    runner = Runner(config)
    events = []
    for t, p in zip(series.time, series.price):
        events.extend(runner.step_raw(int(t), float(p)))
    return events


def rising_path(n_moves=10, start=100.0, move=0.01):
    """Strictly rising path where each point is one full fractional move
    beyond the previous one (nudged so the computed move always triggers)."""
    prices = [start]
    for _ in range(n_moves):
        p = prices[-1] * (1.0 + move)
        while (p - prices[-1]) / prices[-1] < move:
            p = np.nextafter(p, np.inf)
        prices.append(p)
    return make_series(prices)


class TestCanonicalTrace:
    def setup_method(self):
        self.series = make_series(TRACE_PRICES)
        self.config = DissectionConfig(0.01)
        self.d = dissect(self.series, self.config)

    def test_events(self):
        got = [
            (e.kind, e.mode, e.time, e.price, e.tick_index, e.intrinsic_index)
            for e in self.d.events
        ]
        assert got == TRACE_EVENTS

    def test_segments(self):
        got = [
            (s.kind, s.start_price, s.end_price, s.start_time, s.end_time, s.magnitude)
            for s in self.d.segments
        ]
        assert got == TRACE_SEGMENTS

    def test_open_overshoot(self):
        open_os = self.d.open_overshoot
        assert open_os.kind is SegmentKind.OVERSHOOT
        assert open_os.start_price == 103.0
        assert open_os.end_price == 103.0
        assert open_os.magnitude == 0.0

    def test_counts(self):
        assert count_dc(self.series, 0.01) == 3
        assert self.d.n_directional_changes == 3

    def test_avg_overshoot(self):
        # two closed overshoot segments: 1/101 and 0
        assert avg_overshoot(self.series, 0.01) == (1.0 / 101.0 + 0.0) / 2.0

    def test_coastline(self):
        line = coastline(self.d)
        assert list(line.intrinsic_index) == [0, 1, 2]
        assert list(line.price) == [101.0, 100.0, 103.0]
        expected = 0.01 + 1.0 / 101.0 + 2.0 / 102.0 + 0.0 + 0.03
        assert line.total_length == pytest.approx(expected, rel=1e-15)

    def test_streaming_matches_batch(self):
        assert event_tuples(stream_events(self.series, self.config)) == event_tuples(
            self.d.events
        )


class TestDegenerateInputs:
    def test_constant_series_has_no_events(self):
        series = make_series([5.0] * 50)
        d = dissect(series, DissectionConfig(0.01))
        assert len(d.events) == 0
        assert len(d.segments) == 0
        assert d.open_overshoot is None
        runner = Runner(DissectionConfig(0.01))
        for point in series:
            assert list(runner.step(point)) == []
        assert runner.mode is Mode.UNSET

    def test_empty_series(self):
        series = make_series([])
        d = dissect(series, DissectionConfig(0.01))
        assert len(d.events) == 0 and len(d.segments) == 0
        line = coastline(d)
        assert len(line) == 0 and line.total_length == 0.0

    def test_single_point(self):
        d = dissect(make_series([100.0]), DissectionConfig(0.01))
        assert len(d.events) == 0

    def test_two_point_two_percent_drop(self):
        assert count_dc(make_series([100.0, 98.0]), 0.01) == 1

    def test_avg_overshoot_requires_closed_segment(self):
        with pytest.raises(InsufficientEventsError):
            avg_overshoot(make_series([5.0] * 10), 0.01)
        # a single directional change never closes an overshoot
        with pytest.raises(InsufficientEventsError):
            avg_overshoot(make_series([100.0, 98.0]), 0.01)

    def test_time_regression_rejected_by_runner(self):
        runner = Runner(DissectionConfig(0.01))
        runner.step(PricePoint(1000, 100.0))
        with pytest.raises(TimeRegressionError):
            runner.step(PricePoint(500, 100.0))

    def test_nonpositive_price_rejected_by_runner(self):
        runner = Runner(DissectionConfig(0.01))
        with pytest.raises(Exception):
            runner.step_raw(0, 0.0)


class TestRisingPath:
    def test_one_dc_then_nine_overshoots(self):
        series = rising_path(n_moves=10)
        d = dissect(series, DissectionConfig(0.01))
        kinds = [e.kind for e in d.events]
        assert kinds[0] is EventKind.DIRECTIONAL_CHANGE
        assert kinds[1:] == [EventKind.OVERSHOOT] * 9
        assert all(e.mode is Mode.UP for e in d.events)
        assert [e.tick_index for e in d.events] == list(range(1, 11))

    def test_overshoot_chains_from_last_event_price(self):
        # consecutive events are separated by at least one full threshold
        series = rising_path(n_moves=10)
        d = dissect(series, DissectionConfig(0.01))
        prices = [e.price for e in d.events]
        for a, b in zip(prices, prices[1:]):
            assert (b - a) / a >= 0.01

    def test_only_closed_segment_is_first_dc(self):
        series = rising_path(n_moves=10)
        d = dissect(series, DissectionConfig(0.01))
        assert [s.kind for s in d.segments] == [SegmentKind.DIRECTIONAL_CHANGE]
        assert d.open_overshoot is not None
        assert d.open_overshoot.end_price == series.price[-1]


class TestSawtooth:
    def _series(self, n=9, amplitude=0.01):
        from intrinsic import GeneratorKind, GeneratorSpec, generate_series

        return generate_series(
            GeneratorSpec(GeneratorKind.SAWTOOTH, n=n, seed=0, amplitude=amplitude)
        )

    def test_one_dc_per_swing_zero_overshoots(self):
        series = self._series(n=9)
        d = dissect(series, DissectionConfig(0.01))
        assert d.n_directional_changes == len(series) - 1
        assert all(e.kind is EventKind.DIRECTIONAL_CHANGE for e in d.events)
        assert avg_overshoot(series, 0.01) == 0.0

    def test_modes_alternate_starting_up(self):
        series = self._series(n=6)
        d = dissect(series, DissectionConfig(0.01))
        modes = [e.mode for e in d.events]
        assert modes == [Mode.UP, Mode.DOWN, Mode.UP, Mode.DOWN, Mode.UP]


class TestOracleEquivalence:
    @pytest.mark.parametrize("use_log", [False, True])
    def test_three_routes_bitwise_equal(self, rng, use_log):
        convention = LOG if use_log else FRAC
        for _ in range(25):
            series = random_walk_series(rng)
            h = float(rng.uniform(0.001, 0.03))
            config = DissectionConfig(h, convention)
            d = dissect(series, config)
            batch = event_tuples(d.events)
            stream = event_tuples(stream_events(series, config))
            ref_events = naive_dissect(series.time, series.price, h, use_log)[0]
            ref = [
                (0 if k == "dc" else 1, m, int(t), float(p).hex(), i, j)
                for j, (k, m, t, p, i) in enumerate(ref_events)
            ]
            assert batch == stream == ref

    def test_segments_match_reference(self, rng):
        for _ in range(10):
            series = random_walk_series(rng)
            h = float(rng.uniform(0.002, 0.02))
            d = dissect(series, DissectionConfig(h))
            ref_segments = naive_dissect(series.time, series.price, h)[1]
            got = [
                (
                    "dc" if s.kind is SegmentKind.DIRECTIONAL_CHANGE else "os",
                    s.start_price,
                    s.start_time,
                    s.end_price,
                    s.end_time,
                    s.magnitude,
                )
                for s in d.segments
            ]
            assert got == ref_segments

    def test_count_dc_matches_reference_on_long_walk(self):
        from intrinsic import GeneratorKind, GeneratorSpec, generate_series

        series = generate_series(
            GeneratorSpec(GeneratorKind.ARITHMETIC_RANDOM_WALK, n=100_000, seed=5, step=0.01)
        )
        for h in (0.001, 0.0025, 0.005):
            assert count_dc(series, h) == naive_count_dc(series.time, series.price, h)

    def test_avg_overshoot_matches_reference_exactly(self, rng):
        for _ in range(10):
            series = random_walk_series(rng, n=400)
            h = float(rng.uniform(0.001, 0.01))
            ref = naive_avg_overshoot(series.time, series.price, h)
            if ref is None:
                with pytest.raises(InsufficientEventsError):
                    avg_overshoot(series, h)
            else:
                assert avg_overshoot(series, h) == ref


class TestInvariants:
    def test_dc_modes_alternate(self, rng):
        for _ in range(40):
            series = random_walk_series(rng)
            d = dissect(series, DissectionConfig(float(rng.uniform(0.001, 0.02))))
            dc_modes = [e.mode for e in d.events if e.kind is EventKind.DIRECTIONAL_CHANGE]
            for a, b in zip(dc_modes, dc_modes[1:]):
                assert a is not b

    def test_intrinsic_index_increments_by_one(self, rng):
        series = random_walk_series(rng, n=500)
        d = dissect(series, DissectionConfig(0.002))
        assert [e.intrinsic_index for e in d.events] == list(range(len(d.events)))

    def test_scale_invariance(self, rng):
        for k in (0.01, 1.0, 100.0):
            for _ in range(10):
                series = random_walk_series(rng)
                h = float(rng.uniform(0.001, 0.02))
                base = dissect(series, DissectionConfig(h))
                scaled_series = PriceSeries(series.time, series.price * k, validate=False)
                scaled = dissect(scaled_series, DissectionConfig(h))
                assert [e.tick_index for e in base.events] == [
                    e.tick_index for e in scaled.events
                ]
                assert [e.kind for e in base.events] == [e.kind for e in scaled.events]
                assert [e.mode for e in base.events] == [e.mode for e in scaled.events]

    def test_threshold_monotonicity(self, rng):
        for _ in range(60):
            series = random_walk_series(rng)
            h1, h2 = np.sort(rng.uniform(0.001, 0.04, 2))
            if h1 == h2:
                continue
            assert count_dc(series, float(h1)) >= count_dc(series, float(h2))

    def test_dc_segment_magnitudes_reach_threshold(self, rng):
        for _ in range(40):
            series = random_walk_series(rng)
            h = float(rng.uniform(0.001, 0.02))
            d = dissect(series, DissectionConfig(h))
            for s in d.segments:
                if s.kind is SegmentKind.DIRECTIONAL_CHANGE:
                    assert s.magnitude >= h
                else:
                    assert s.magnitude >= 0.0

    def test_segments_alternate_and_tile(self, rng):
        for _ in range(20):
            series = random_walk_series(rng)
            d = dissect(series, DissectionConfig(float(rng.uniform(0.001, 0.02))))
            kinds = [s.kind for s in d.segments]
            for a, b in zip(kinds, kinds[1:]):
                assert a is not b
            if kinds:
                assert kinds[0] is SegmentKind.DIRECTIONAL_CHANGE
                assert kinds[-1] is SegmentKind.DIRECTIONAL_CHANGE
            # consecutive segments share their boundary point
            segs = list(d.segments)
            for a, b in zip(segs, segs[1:]):
                assert a.end_price == b.start_price
                assert a.end_time == b.start_time

    def test_events_within_overshoot_run_spaced_by_threshold(self, rng):
        for _ in range(20):
            series = random_walk_series(rng, n=500, sigma=0.01)
            h = float(rng.uniform(0.002, 0.01))
            d = dissect(series, DissectionConfig(h))
            events = list(d.events)
            for a, b in zip(events, events[1:]):
                if b.kind is EventKind.OVERSHOOT:
                    assert abs((b.price - a.price) / a.price) >= h

    def test_subsampling_never_adds_events(self, rng):
        for _ in range(40):
            series = random_walk_series(rng)
            h = float(rng.uniform(0.001, 0.02))
            sub = PriceSeries(series.time[::2], series.price[::2], validate=False)
            assert count_dc(sub, h) <= count_dc(series, h)

    def test_constant_stretch_adds_no_events(self, rng):
        for _ in range(20):
            series = random_walk_series(rng, n=300)
            h = float(rng.uniform(0.001, 0.02))
            tail_t = series.time[-1] + 1000 + np.arange(100, dtype=np.int64) * 1000
            grown = PriceSeries(
                np.concatenate([series.time, tail_t]),
                np.concatenate([series.price, np.full(100, series.price[-1])]),
                validate=False,
            )
            assert count_dc(grown, h) == count_dc(series, h)

    def test_coastline_length_bound(self, rng):
        for _ in range(40):
            series = random_walk_series(rng)
            h = float(rng.uniform(0.001, 0.02))
            d = dissect(series, DissectionConfig(h))
            line = coastline(d)
            assert line.total_length >= d.n_directional_changes * h
            assert len(line) == len(d.events)


class TestLogConvention:
    def test_log_thresholds_are_side_symmetric(self):
        # under log returns an exact up-down swing of equal size triggers both ways
        up = 100.0 * np.exp(0.011)
        series = make_series([100.0, up, 100.0])
        d = dissect(series, DissectionConfig(0.01, LOG))
        assert [e.mode for e in d.events] == [Mode.UP, Mode.DOWN]

    def test_runner_log_matches_batch(self, rng):
        series = random_walk_series(rng, n=300)
        config = DissectionConfig(0.004, LOG)
        d = dissect(series, config)
        assert event_tuples(stream_events(series, config)) == event_tuples(d.events)
