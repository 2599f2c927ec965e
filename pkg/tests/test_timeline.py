import numpy as np
import pytest
from hypothesis import given, strategies as st

from diarkit.errors import ValidationError
from diarkit.timeline import (
    Annotation,
    TimeInterval,
    Timeline,
    crop_annotation,
    intersect,
    merge_intervals,
    subtract,
)
from tests.helpers import rasterize, raster_duration, random_timeline


def tl(*spans):
    return Timeline(spans)


class TestTimeInterval:
    def test_rejects_inverted(self):
        with pytest.raises(ValidationError):
            TimeInterval(2.0, 1.0)

    def test_rejects_sub_tolerance(self):
        with pytest.raises(ValidationError):
            TimeInterval(1.0, 1.0 + 1e-12)

    def test_rejects_negative_start(self):
        with pytest.raises(ValidationError):
            TimeInterval(-0.5, 1.0)

    def test_duration(self):
        assert TimeInterval(1.0, 3.5).duration == 2.5


class TestMergeIntervals:
    def test_overlapping_union(self):
        assert merge_intervals([(0, 1), (0.5, 2)]) == tl((0, 2))

    def test_identity(self):
        assert merge_intervals([(0, 1)]) == tl((0, 1))

    def test_adjacency_after_sort(self):
        assert merge_intervals([(2, 3), (0, 1), (1, 2)]) == tl((0, 3))

    def test_idempotent(self):
        once = merge_intervals([(0, 1), (0.5, 2), (5, 6)])
        assert merge_intervals(list(once)) == once

    def test_invalid_interval_names_index(self):
        with pytest.raises(ValidationError, match="index 1"):
            merge_intervals([(0, 1), (3, 2)])


class TestSetOps:
    def test_intersect_basic(self):
        assert intersect(tl((0, 2)), tl((1, 3))) == tl((1, 2))

    def test_intersect_disjoint(self):
        assert intersect(tl((0, 1)), tl((2, 3))) == Timeline()

    def test_intersect_multi(self):
        assert intersect(tl((0, 5)), tl((1, 2), (3, 4))) == tl((1, 2), (3, 4))

    def test_intersect_commutative_and_self(self):
        a = tl((0, 2), (4, 9))
        b = tl((1, 5))
        assert intersect(a, b) == intersect(b, a)
        assert intersect(a, a) == a

    def test_subtract_punch_hole(self):
        assert subtract(tl((0, 10)), tl((4, 6))) == tl((0, 4), (6, 10))

    def test_subtract_self_is_empty(self):
        assert subtract(tl((0, 1)), tl((0, 1))) == Timeline()

    def test_subtract_partial(self):
        assert subtract(tl((0, 3)), tl((2, 5))) == tl((0, 2))

    def test_subtract_empty_is_identity(self):
        a = tl((0, 3), (7, 8))
        assert subtract(a, Timeline()) == a


class TestCropAnnotation:
    def test_basic(self):
        ann = Annotation([((0, 10), "A")])
        assert crop_annotation(ann, tl((2, 4))) == Annotation([((2, 4), "A")])

    def test_full_scope_identity(self):
        ann = Annotation([((0, 1), "A"), ((5, 6), "B")])
        assert crop_annotation(ann, tl((0, 10))) == ann

    def test_speaker_dropped(self):
        ann = Annotation([((0, 1), "A"), ((5, 6), "B")])
        out = crop_annotation(ann, tl((0, 2)))
        assert out == Annotation([((0, 1), "A")])
        assert out.speakers == ("A",)


class TestAnnotation:
    def test_same_speaker_overlap_merges(self):
        ann = Annotation([((0, 1), "A"), ((0.5, 2), "A")])
        assert ann.timeline("A") == tl((0, 2))

    def test_cross_speaker_overlap_allowed(self):
        ann = Annotation([((0, 2), "A"), ((1, 3), "B")])
        assert ann.total() == pytest.approx(4.0)
        assert ann.speech() == tl((0, 3))

    def test_rename(self):
        ann = Annotation([((0, 1), "A"), ((2, 3), "B")])
        out = ann.rename({"A": "X"})
        assert out == Annotation([((0, 1), "X"), ((2, 3), "B")])


finite_times = st.floats(min_value=0.0, max_value=50.0, allow_nan=False)


@st.composite
def timelines(draw):
    spans = draw(st.lists(st.tuples(finite_times, finite_times), max_size=5))
    return Timeline([(min(a, b), max(a, b) + 0.01) for a, b in spans])


@given(timelines(), timelines())
def test_duration_inclusion_exclusion(a, b):
    lhs = a.duration() + b.duration()
    rhs = a.union(b).duration() + a.intersect(b).duration()
    assert lhs == pytest.approx(rhs, abs=1e-9)


@given(timelines(), timelines(), timelines())
def test_boolean_laws(a, b, c):
    assert a.intersect(b) == b.intersect(a)
    assert a.union(b) == b.union(a)
    assert a.intersect(a) == a
    assert a.union(a) == a
    assert a.subtract(b) == a.subtract(a.intersect(b))
    # distributivity: a n (b u c) == (a n b) u (a n c)
    assert a.intersect(b.union(c)) == a.intersect(b).union(a.intersect(c))


def test_quantized_oracle_agreement():
    rng = np.random.default_rng(7)
    for _ in range(300):
        a = random_timeline(rng)
        b = random_timeline(rng)
        fa, fb = rasterize(a), rasterize(b)
        slack = 0.002 * 2 * (len(a) + len(b) + 1)
        assert abs(a.union(b).duration() - raster_duration(fa | fb)) <= slack
        assert abs(a.intersect(b).duration() - raster_duration(fa & fb)) <= slack
        assert abs(a.subtract(b).duration() - raster_duration(fa - fb)) <= slack


def test_covers():
    t = tl((0, 1), (2, 3))
    assert t.covers(0.5)
    assert t.covers(2.0)
    assert not t.covers(1.5)
    assert not t.covers(4.0)
