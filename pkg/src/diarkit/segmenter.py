"""Sliding-window segmentation at multiple scales.

Speech regions are cut into overlapping fixed-length windows per scale; the
finest scale (smallest window) is the base scale at which labels are later
produced. Coarser scales are aligned to the base by nearest window center.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ValidationError
from .timeline import TOLERANCE, TimeInterval, Timeline


@dataclass(frozen=True)
class ScaleSpec:
    """One segmentation scale: window length and hop, both in seconds."""

    window: float
    shift: float

    def __post_init__(self):
        if not (0 < self.shift <= self.window):
            raise ConfigError(
                f"need 0 < shift <= window, got window={self.window} shift={self.shift}"
            )

    def matches(self, other: "ScaleSpec", tol: float = TOLERANCE) -> bool:
        return abs(self.window - other.window) <= tol and abs(self.shift - other.shift) <= tol


@dataclass(frozen=True)
class Segment:
    """A window instance, tagged with its scale and source speech region."""

    interval: TimeInterval
    scale_index: int = 0
    region_index: int = 0


def segment_region(region: TimeInterval, scale: ScaleSpec,
                   scale_index: int = 0, region_index: int = 0) -> list[Segment]:
    """Cut one speech region into windows of ``scale``.

    Windows start at region.start + k*shift and are emitted while the start
    lies inside the region; trailing windows are clipped to the region end,
    never extended past it. A region no longer than the window yields exactly
    one segment covering the whole region.
    """
    length = region.duration
    if length < scale.window - TOLERANCE:
        return [Segment(region, scale_index, region_index)]
    segments = []
    k = 0
    while True:
        start = region.start + k * scale.shift
        if start >= region.end - TOLERANCE:
            break
        end = min(start + scale.window, region.end)
        segments.append(Segment(TimeInterval(start, end), scale_index, region_index))
        k += 1
    return segments


def segment_timeline(speech: Timeline, scale: ScaleSpec, scale_index: int = 0) -> list[Segment]:
    """Segment every region of a speech timeline at one scale."""
    out: list[Segment] = []
    for region_index, region in enumerate(speech):
        out.extend(segment_region(region, scale, scale_index, region_index))
    return out


def build_scale_map(base_segments, other_scale_segments) -> np.ndarray:
    """Map each base segment to the other-scale segment with nearest center.

    Both lists must be nonempty and sorted by center; ties go to the earlier
    segment. Returns one index per base segment, monotone nondecreasing.
    """
    if not len(base_segments) or not len(other_scale_segments):
        raise ValidationError("build_scale_map requires nonempty segment lists")
    base_centers = np.asarray([_center(s) for s in base_segments])
    other_centers = np.asarray([_center(s) for s in other_scale_segments])
    diffs = np.abs(base_centers[:, None] - other_centers[None, :])
    return diffs.argmin(axis=1)


def _center(seg) -> float:
    if isinstance(seg, Segment):
        return seg.interval.middle
    if isinstance(seg, TimeInterval):
        return seg.middle
    start, end = seg
    return 0.5 * (float(start) + float(end))


def match_segments(derived: list[Segment], table: np.ndarray, tol: float = 1e-3) -> np.ndarray:
    """Match derived segments to a (start, end) table within ``tol`` seconds.

    ``table`` is an (n, 2) array as stored in the feature container. Returns
    the table row index for each derived segment; raises if any segment has
    no row within tolerance (both endpoints must match) or the counts differ.
    """
    table = np.asarray(table, dtype=np.float64)
    if len(derived) != len(table):
        raise ValidationError(
            f"segment count mismatch: derived {len(derived)}, table {len(table)}"
        )
    starts = np.array([s.interval.start for s in derived])
    ends = np.array([s.interval.end for s in derived])
    order = np.argsort(table[:, 0], kind="stable")
    if (np.abs(table[order, 0] - starts) > tol).any() or (
        np.abs(table[order, 1] - ends) > tol
    ).any():
        bad = int(
            np.argmax(
                np.maximum(
                    np.abs(table[order, 0] - starts), np.abs(table[order, 1] - ends)
                )
                > tol
            )
        )
        raise ValidationError(
            f"segment {bad} has no table row within {tol}s: "
            f"derived [{starts[bad]:.3f}, {ends[bad]:.3f}]"
        )
    return order
