"""Interval algebra over recording time.

All times are float seconds. Intervals are half-open in spirit but stored as
(start, end) endpoints; a shared absolute tolerance of ``TOLERANCE`` seconds
(1 ns) decides when endpoints touch. Everything here is immutable and pure,
so values can be shared freely between workers.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ValidationError

TOLERANCE = 1e-9

IntervalLike = "TimeInterval | tuple[float, float]"


@dataclass(frozen=True, order=True)
class TimeInterval:
    """A single [start, end] span, at least ``TOLERANCE`` seconds long."""

    start: float
    end: float

    def __post_init__(self):
        if self.start < 0:
            raise ValidationError(f"interval start must be >= 0, got {self.start}")
        if self.end - self.start < TOLERANCE:
            raise ValidationError(
                f"interval [{self.start}, {self.end}] shorter than tolerance"
            )

    @property
    def duration(self) -> float:
        return self.end - self.start

    @property
    def middle(self) -> float:
        return 0.5 * (self.start + self.end)

    def contains(self, t: float, tol: float = TOLERANCE) -> bool:
        return self.start - tol <= t <= self.end + tol

    def intersection(self, other: "TimeInterval") -> "TimeInterval | None":
        start = max(self.start, other.start)
        end = min(self.end, other.end)
        if end - start >= TOLERANCE:
            return TimeInterval(start, end)
        return None


def _coerce(raw: Iterable, where: str) -> list[TimeInterval]:
    out = []
    for idx, item in enumerate(raw):
        if isinstance(item, TimeInterval):
            out.append(item)
            continue
        try:
            start, end = item
            out.append(TimeInterval(float(start), float(end)))
        except (TypeError, ValueError, ValidationError) as exc:
            raise ValidationError(f"{where}: invalid interval at index {idx}: {exc}")
    return out


class Timeline:
    """An ordered set of pairwise-disjoint intervals.

    The constructor sorts, merges overlaps, and fuses adjacent intervals whose
    gap is below tolerance, so any iterable of intervals (or (start, end)
    pairs) yields the minimal disjoint cover of their union.
    """

    __slots__ = ("_intervals", "_starts")

    def __init__(self, intervals: Iterable = ()):
        source = _coerce(intervals, "Timeline")
        source.sort()
        merged: list[list[float]] = []
        for iv in source:
            if merged and iv.start <= merged[-1][1] + TOLERANCE:
                merged[-1][1] = max(merged[-1][1], iv.end)
            else:
                merged.append([iv.start, iv.end])
        object.__setattr__(
            self, "_intervals", tuple(TimeInterval(s, e) for s, e in merged)
        )
        object.__setattr__(self, "_starts", [iv.start for iv in self._intervals])

    def __setattr__(self, name, value):
        raise AttributeError("Timeline is immutable")

    def __iter__(self) -> Iterator[TimeInterval]:
        return iter(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __bool__(self) -> bool:
        return bool(self._intervals)

    def __getitem__(self, idx: int) -> TimeInterval:
        return self._intervals[idx]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Timeline):
            return NotImplemented
        return self._intervals == other._intervals

    def __hash__(self) -> int:
        return hash(self._intervals)

    def __repr__(self) -> str:
        spans = ", ".join(f"[{iv.start:g}, {iv.end:g}]" for iv in self._intervals)
        return f"Timeline({spans})"

    def duration(self) -> float:
        return sum(iv.duration for iv in self._intervals)

    def extent(self) -> TimeInterval | None:
        if not self._intervals:
            return None
        return TimeInterval(self._intervals[0].start, self._intervals[-1].end)

    def covers(self, t: float, tol: float = TOLERANCE) -> bool:
        """True if instant ``t`` falls inside (or within ``tol`` of) the set."""
        idx = bisect_right(self._starts, t)
        if idx > 0 and self._intervals[idx - 1].contains(t, tol):
            return True
        if idx < len(self._intervals) and self._intervals[idx].contains(t, tol):
            return True
        return False

    def union(self, other: "Timeline") -> "Timeline":
        return Timeline(list(self._intervals) + list(other._intervals))

    def intersect(self, other: "Timeline") -> "Timeline":
        a, b = self._intervals, other._intervals
        out: list[tuple[float, float]] = []
        i = j = 0
        while i < len(a) and j < len(b):
            start = max(a[i].start, b[j].start)
            end = min(a[i].end, b[j].end)
            if end - start >= TOLERANCE:
                out.append((start, end))
            if a[i].end < b[j].end:
                i += 1
            else:
                j += 1
        return Timeline(out)

    def subtract(self, other: "Timeline") -> "Timeline":
        out: list[tuple[float, float]] = []
        b = other._intervals
        j = 0
        for iv in self._intervals:
            cursor = iv.start
            while j < len(b) and b[j].end <= cursor:
                j += 1
            k = j
            while k < len(b) and b[k].start < iv.end:
                if b[k].start - cursor >= TOLERANCE:
                    out.append((cursor, b[k].start))
                cursor = max(cursor, b[k].end)
                if cursor >= iv.end:
                    break
                k += 1
            if iv.end - cursor >= TOLERANCE:
                out.append((cursor, iv.end))
        return Timeline(out)

    def crop(self, scope: "Timeline") -> "Timeline":
        return self.intersect(scope)


class Annotation:
    """Speaker-labeled intervals; same-speaker overlaps are merged.

    Cross-speaker overlap is allowed (two speakers can be active at once),
    which is exactly what overlap assignment produces downstream.
    """

    __slots__ = ("_by_speaker",)

    def __init__(self, entries: Iterable = ()):
        grouped: dict[str, list] = {}
        for item in entries:
            interval, speaker = item
            if not isinstance(speaker, str) or not speaker:
                raise ValidationError(f"speaker label must be a non-empty string: {speaker!r}")
            grouped.setdefault(speaker, []).append(interval)
        by_speaker = {
            spk: Timeline(ivs) for spk, ivs in sorted(grouped.items())
        }
        object.__setattr__(self, "_by_speaker", by_speaker)

    def __setattr__(self, name, value):
        raise AttributeError("Annotation is immutable")

    @classmethod
    def from_timelines(cls, by_speaker: dict[str, Timeline]) -> "Annotation":
        ann = cls()
        object.__setattr__(
            ann,
            "_by_speaker",
            {spk: tl for spk, tl in sorted(by_speaker.items()) if tl},
        )
        return ann

    @property
    def speakers(self) -> tuple[str, ...]:
        return tuple(self._by_speaker)

    def __bool__(self) -> bool:
        return any(self._by_speaker.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Annotation):
            return NotImplemented
        return self._by_speaker == other._by_speaker

    def __repr__(self) -> str:
        parts = ", ".join(f"{spk}: {tl!r}" for spk, tl in self._by_speaker.items())
        return f"Annotation({parts})"

    def timeline(self, speaker: str) -> Timeline:
        return self._by_speaker.get(speaker, Timeline())

    def itertracks(self) -> Iterator[tuple[TimeInterval, str]]:
        """All (interval, speaker) entries sorted by (start, end, speaker)."""
        entries = [
            (iv, spk) for spk, tl in self._by_speaker.items() for iv in tl
        ]
        entries.sort(key=lambda e: (e[0].start, e[0].end, e[1]))
        return iter(entries)

    def speech(self) -> Timeline:
        """Union of all speakers' intervals."""
        out = Timeline()
        for tl in self._by_speaker.values():
            out = out.union(tl)
        return out

    def total(self) -> float:
        """Total labeled time, counted with multiplicity across speakers."""
        return sum(tl.duration() for tl in self._by_speaker.values())

    def crop(self, scope: Timeline) -> "Annotation":
        return Annotation.from_timelines(
            {spk: tl.crop(scope) for spk, tl in self._by_speaker.items()}
        )

    def rename(self, mapping: dict[str, str]) -> "Annotation":
        """Relabel speakers; labels absent from ``mapping`` are kept as-is."""
        out: dict[str, list] = {}
        for spk, tl in self._by_speaker.items():
            out.setdefault(mapping.get(spk, spk), []).extend(tl)
        return Annotation.from_timelines({spk: Timeline(ivs) for spk, ivs in out.items()})

    def merged_with(self, entries: Iterable) -> "Annotation":
        all_entries = list(self.itertracks()) + list(entries)
        return Annotation(all_entries)


def merge_intervals(raw: Iterable) -> Timeline:
    """Minimal disjoint cover of an interval union; idempotent."""
    return Timeline(raw)


def intersect(a: Timeline, b: Timeline) -> Timeline:
    return a.intersect(b)


def subtract(a: Timeline, b: Timeline) -> Timeline:
    return a.subtract(b)


def crop_annotation(ann: Annotation, scope: Timeline) -> Annotation:
    return ann.crop(scope)
