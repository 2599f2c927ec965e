"""Speech-posterior post-processing.

Turns frame-level speech probabilities into a speech :class:`Timeline`:
ensemble fusion across detectors, optional median smoothing, hysteresis
(dual-threshold) binarization, and duration-based cleanup. The same
machinery binarizes overlap posteriors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ValidationError
from .timeline import TOLERANCE, Timeline


@dataclass(frozen=True)
class PosteriorTrack:
    """Uniform frame-rate probabilities; frame i spans [i*fp, (i+1)*fp)."""

    frame_period: float
    values: np.ndarray

    def __post_init__(self):
        if self.frame_period <= 0:
            raise ValidationError(f"frame_period must be > 0, got {self.frame_period}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValidationError("posterior values must be a 1-d sequence")
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise ValidationError("posterior values must lie in [0, 1]")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def extent(self) -> float:
        return len(self.values) * self.frame_period


@dataclass(frozen=True)
class BinarizeParams:
    """Hysteresis and cleanup knobs for posterior binarization.

    ``onset``/``offset`` are the open/close thresholds (offset <= onset;
    setting them equal recovers single-threshold behavior). Durations are in
    seconds; ``smooth_window`` is an odd frame count, 1 meaning no smoothing.
    """

    onset: float = 0.5
    offset: float = 0.5
    min_duration_on: float = 0.0
    min_duration_off: float = 0.0
    pad_onset: float = 0.0
    pad_offset: float = 0.0
    smooth_window: int = 1

    def __post_init__(self):
        if not (0.0 <= self.offset <= self.onset <= 1.0):
            raise ConfigError(
                f"need 0 <= offset <= onset <= 1, got onset={self.onset} offset={self.offset}"
            )
        for name in ("min_duration_on", "min_duration_off", "pad_onset", "pad_offset"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise ConfigError(f"smooth_window must be odd and >= 1, got {self.smooth_window}")


def fuse_posteriors(tracks: list[PosteriorTrack], weights) -> PosteriorTrack:
    """Per-frame weighted mean of an ensemble of tracks.

    Tracks must share a frame period; shorter tracks are zero-padded to the
    longest (missing model output is treated as silence). Weights are
    normalized to sum to one.
    """
    if not tracks:
        raise ConfigError("fuse_posteriors needs at least one track")
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or len(w) != len(tracks):
        raise ConfigError(f"expected {len(tracks)} weights, got {w.shape}")
    if (w < 0).any():
        raise ConfigError("fusion weights must be nonnegative")
    total = w.sum()
    if total <= 0:
        raise ConfigError("fusion weights must not all be zero")
    fp = tracks[0].frame_period
    for t in tracks[1:]:
        if abs(t.frame_period - fp) > TOLERANCE:
            raise ConfigError(
                f"mismatched frame periods: {fp} vs {t.frame_period}"
            )
    n = max(len(t) for t in tracks)
    acc = np.zeros(n, dtype=np.float64)
    for t, wt in zip(tracks, w / total):
        acc[: len(t)] += wt * t.values
    return PosteriorTrack(fp, acc)


def median_smooth(track: PosteriorTrack, window: int) -> PosteriorTrack:
    """Centered running median; the window truncates at the edges."""
    if window < 1 or window % 2 == 0:
        raise ConfigError(f"median window must be odd and >= 1, got {window}")
    if window == 1 or len(track) == 0:
        return track
    half = window // 2
    values = track.values
    out = np.empty_like(values)
    for i in range(len(values)):
        lo = max(0, i - half)
        hi = min(len(values), i + half + 1)
        out[i] = np.median(values[lo:hi])
    return PosteriorTrack(track.frame_period, out)


def _hysteresis_regions(values: np.ndarray, fp: float, onset: float, offset: float):
    """Raw active regions: open on value > onset, close on value < offset."""
    regions: list[tuple[float, float]] = []
    open_at: float | None = None
    for i, v in enumerate(values):
        if open_at is None:
            if v > onset:
                open_at = i * fp
        elif v < offset:
            regions.append((open_at, i * fp))
            open_at = None
    if open_at is not None:
        regions.append((open_at, len(values) * fp))
    return regions


def binarize(track: PosteriorTrack, p: BinarizeParams) -> Timeline:
    """Hysteresis binarization with padding and duration cleanup.

    Processing order: smooth, hysteresis scan, pad each region
    (pad_onset before / pad_offset after, clipped to the track extent),
    merge regions separated by gaps shorter than min_duration_off, then drop
    regions shorter than min_duration_on. Clipping happens before the merge
    and drop steps so the output invariants (region >= min_duration_on, gap
    >= min_duration_off) hold for what is actually returned.
    """
    if p.smooth_window > 1:
        track = median_smooth(track, p.smooth_window)
    extent = track.extent
    regions = _hysteresis_regions(track.values, track.frame_period, p.onset, p.offset)

    padded = []
    for start, end in regions:
        start = max(0.0, start - p.pad_onset)
        end = min(extent, end + p.pad_offset)
        if end - start >= TOLERANCE:
            padded.append((start, end))

    merged: list[list[float]] = []
    for start, end in padded:
        if merged and start - merged[-1][1] < p.min_duration_off:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])

    kept = [(s, e) for s, e in merged if e - s >= p.min_duration_on - TOLERANCE]
    return Timeline(kept)
