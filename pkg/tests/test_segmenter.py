import math

import numpy as np
import pytest

from diarkit.errors import ConfigError, ValidationError
from diarkit.segmenter import (
    ScaleSpec,
    build_scale_map,
    match_segments,
    segment_region,
    segment_timeline,
)
from diarkit.timeline import TimeInterval, Timeline


def spans(segments):
    return [(s.interval.start, s.interval.end) for s in segments]


class TestScaleSpec:
    def test_shift_above_window_rejected(self):
        with pytest.raises(ConfigError):
            ScaleSpec(window=0.5, shift=0.75)

    def test_zero_shift_rejected(self):
        with pytest.raises(ConfigError):
            ScaleSpec(window=0.5, shift=0.0)


class TestSegmentRegion:
    def test_enumerated_windows(self):
        got = spans(segment_region(TimeInterval(0, 2.0), ScaleSpec(1.5, 0.75)))
        assert got == [(0.0, 1.5), (0.75, 2.0), (1.5, 2.0)]

    def test_short_region_single_segment(self):
        got = spans(segment_region(TimeInterval(0, 0.8), ScaleSpec(1.5, 0.75)))
        assert got == [(0, 0.8)]

    def test_exact_window_length(self):
        got = spans(segment_region(TimeInterval(0, 1.5), ScaleSpec(1.5, 0.75)))
        assert got == [(0.0, 1.5), (0.75, 1.5)]

    def test_offsets_carry_region_start(self):
        got = spans(segment_region(TimeInterval(10.0, 12.0), ScaleSpec(1.5, 0.75)))
        assert got == [(10.0, 11.5), (10.75, 12.0), (11.5, 12.0)]

    def test_coverage_and_count_bounds(self):
        rng = np.random.default_rng(23)
        for _ in range(300):
            window = float(rng.uniform(0.2, 3.0))
            shift = float(rng.uniform(0.05, 1.0)) * window
            length = float(rng.uniform(window, 30.0))
            start = float(rng.uniform(0, 5.0))
            region = TimeInterval(start, start + length)
            segs = segment_region(region, ScaleSpec(window, shift))
            # coverage: union equals the region
            union = Timeline([s.interval for s in segs])
            assert len(union) == 1
            assert union[0].start == pytest.approx(region.start, abs=1e-9)
            assert union[0].end == pytest.approx(region.end, abs=1e-9)
            # count bounds
            lo = math.ceil((length - window) / shift - 1e-9) + 1
            hi = math.ceil(length / shift + 1e-9)
            assert lo <= len(segs) <= hi
            # consecutive starts differ by exactly the shift
            starts = [s.interval.start for s in segs]
            for a, b in zip(starts[:-1], starts[1:]):
                assert b - a == pytest.approx(shift, abs=1e-9)

    def test_segment_timeline_tags_regions(self):
        speech = Timeline([(0, 2), (5, 6)])
        segs = segment_timeline(speech, ScaleSpec(1.0, 0.5), scale_index=2)
        assert {s.scale_index for s in segs} == {2}
        assert {s.region_index for s in segs} == {0, 1}


class TestBuildScaleMap:
    def test_identity_for_identical_lists(self):
        segs = [(0.0, 0.5), (0.5, 1.0), (1.0, 1.5)]
        np.testing.assert_array_equal(build_scale_map(segs, segs), [0, 1, 2])

    def test_single_target(self):
        mapping = build_scale_map([(0.0, 0.5), (0.5, 1.0)], [(0.5, 1.0)])
        np.testing.assert_array_equal(mapping, [0, 0])

    def test_tie_breaks_to_earlier(self):
        mapping = build_scale_map([(0.5, 1.5)], [(0.0, 1.0), (1.0, 2.0)])
        np.testing.assert_array_equal(mapping, [0])

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            build_scale_map([], [(0, 1)])

    def test_monotone_nondecreasing(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            base = np.sort(rng.uniform(0, 30, size=int(rng.integers(1, 40))))
            coarse = np.sort(rng.uniform(0, 30, size=int(rng.integers(1, 15))))
            mapping = build_scale_map(
                [(b, b + 0.5) for b in base], [(c, c + 1.5) for c in coarse]
            )
            assert (np.diff(mapping) >= 0).all()


class TestMatchSegments:
    def test_exact_match(self):
        segs = segment_region(TimeInterval(0, 2.0), ScaleSpec(1.5, 0.75))
        table = np.array([[s.interval.start, s.interval.end] for s in segs])
        np.testing.assert_array_equal(match_segments(segs, table), [0, 1, 2])

    def test_within_tolerance(self):
        segs = segment_region(TimeInterval(0, 2.0), ScaleSpec(1.5, 0.75))
        table = np.array([[s.interval.start + 4e-4, s.interval.end - 4e-4] for s in segs])
        np.testing.assert_array_equal(match_segments(segs, table), [0, 1, 2])

    def test_count_mismatch(self):
        segs = segment_region(TimeInterval(0, 2.0), ScaleSpec(1.5, 0.75))
        with pytest.raises(ValidationError, match="count"):
            match_segments(segs, np.array([[0.0, 1.5]]))

    def test_out_of_tolerance(self):
        segs = segment_region(TimeInterval(0, 2.0), ScaleSpec(1.5, 0.75))
        table = np.array([[s.interval.start, s.interval.end] for s in segs])
        table[1, 0] += 0.01
        with pytest.raises(ValidationError, match="no table row"):
            match_segments(segs, table)
