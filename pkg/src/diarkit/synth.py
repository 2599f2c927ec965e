"""Seeded synthetic fixtures: reference speakers plus matching features.

The generator works on the posterior frame grid (all turn boundaries are
integer frame multiples), builds ideal speech/overlap posteriors, and emits
per-scale embeddings as duration-weighted mixtures of speaker centroids plus
Gaussian noise. Identical seeds produce byte-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .errors import ConfigError
from .formats import FeatureSet, ScaleEmbeddings
from .segmenter import segment_timeline
from .timeline import Annotation, Timeline
from .vad import PosteriorTrack

_GAP_PROBABILITY = 0.25        # chance of silence after a turn
_GAP_BOUNDS = (0.2, 0.5)       # silence length range, seconds
_OVERLAP_BOUNDS = (0.3, 0.9)   # per-junction overlap range, seconds
_CENTROID_ATTEMPTS = 2000


@dataclass(frozen=True)
class SynthSpec:
    """Knobs for one synthetic recording."""

    n_speakers: int
    length: float = 60.0
    turn_min: float = 2.0
    turn_max: float = 6.0
    overlap_fraction: float = 0.1
    dim: int = 64
    centroid_min_angle: float = 78.0   # degrees between any two centroids
    noise_scale: float = 0.05
    seed: int = 0
    frame_period: float = 0.01

    def __post_init__(self):
        if self.n_speakers < 1:
            raise ConfigError("n_speakers must be >= 1")
        if self.length <= 0 or self.dim < 1 or self.frame_period <= 0:
            raise ConfigError("length, dim and frame_period must be positive")
        if not (0 < self.turn_min <= self.turn_max):
            raise ConfigError("need 0 < turn_min <= turn_max")
        if self.turn_min > self.length:
            raise ConfigError("turn_min exceeds the recording length")
        if not (0.0 <= self.overlap_fraction < 1.0):
            raise ConfigError("overlap_fraction must lie in [0, 1)")
        if self.overlap_fraction > 0 and self.n_speakers < 2:
            raise ConfigError("overlap requires at least two speakers")
        if self.noise_scale < 0:
            raise ConfigError("noise_scale must be >= 0")
        if not (0 < self.centroid_min_angle <= 180):
            raise ConfigError("centroid_min_angle must lie in (0, 180] degrees")


@dataclass(frozen=True)
class SynthResult:
    recording_id: str
    features: FeatureSet
    reference: Annotation
    speech: Timeline
    overlap: Timeline


def _sample_centroids(rng: np.random.Generator, spec: SynthSpec) -> np.ndarray:
    max_cos = math.cos(math.radians(spec.centroid_min_angle))
    centroids: list[np.ndarray] = []
    for _ in range(_CENTROID_ATTEMPTS):
        if len(centroids) == spec.n_speakers:
            break
        v = rng.normal(size=spec.dim)
        v /= np.linalg.norm(v)
        if all(float(np.dot(v, c)) <= max_cos for c in centroids):
            centroids.append(v)
    if len(centroids) < spec.n_speakers:
        raise ConfigError(
            f"infeasible spec: cannot place {spec.n_speakers} centroids with "
            f"pairwise angle >= {spec.centroid_min_angle} deg in dim {spec.dim}"
        )
    return np.stack(centroids)


def _build_turns(rng: np.random.Generator, spec: SynthSpec) -> list[list[int]]:
    """Turn list [(start_frame, end_frame, speaker)] on the frame grid."""
    fp = spec.frame_period
    total = int(round(spec.length / fp))
    turn_lo = max(1, int(round(spec.turn_min / fp)))
    turn_hi = max(turn_lo, int(round(spec.turn_max / fp)))
    gap_lo = int(round(_GAP_BOUNDS[0] / fp))
    gap_hi = int(round(_GAP_BOUNDS[1] / fp))

    turns: list[list[int]] = []
    t = 0
    prev = -1
    while t < total:
        if spec.n_speakers == 1:
            spk = 0
        elif prev < 0:
            spk = int(rng.integers(spec.n_speakers))
        else:
            spk = int(rng.integers(spec.n_speakers - 1))
            if spk >= prev:
                spk += 1
        frames = int(rng.integers(turn_lo, turn_hi + 1))
        end = min(t + frames, total)
        if end - t >= 1:
            turns.append([t, end, spk])
            prev = spk
        t = end
        if t < total and rng.random() < _GAP_PROBABILITY:
            t += int(rng.integers(gap_lo, gap_hi + 1))
    if not turns:
        raise ConfigError("infeasible spec: no turns fit into the recording")
    return turns


def _insert_overlap(rng: np.random.Generator, spec: SynthSpec,
                    turns: list[list[int]]) -> int:
    """Shift turn starts back across junctions until the overlap target."""
    if spec.overlap_fraction <= 0:
        return 0
    fp = spec.frame_period
    extent = sum(e - s for s, e, _ in turns)
    target = int(round(spec.overlap_fraction * extent))
    lo = max(1, int(round(_OVERLAP_BOUNDS[0] / fp)))
    hi = int(round(_OVERLAP_BOUNDS[1] / fp))

    junctions = [
        i for i in range(len(turns) - 1)
        if turns[i][1] == turns[i + 1][0] and turns[i][2] != turns[i + 1][2]
    ]
    # Overlap must stay strictly two-party: bound each shift by the original
    # (pre-shift) durations of both turns at the junction.
    original_dur = [e - s for s, e, _ in turns]
    added = 0
    for j in rng.permutation(len(junctions)):
        if added >= target:
            break
        i = junctions[int(j)]
        room = int(0.45 * min(original_dur[i], original_dur[i + 1]))
        if room < lo:
            continue
        delta = int(rng.integers(lo, min(hi, room) + 1))
        delta = min(delta, target - added)
        turns[i + 1][0] -= delta
        added += delta
    return added


def generate(spec: SynthSpec, config: PipelineConfig | None = None) -> SynthResult:
    """Produce one synthetic recording with its reference annotation."""
    if config is None:
        config = PipelineConfig()
    rng = np.random.default_rng(spec.seed)
    fp = spec.frame_period

    centroids = _sample_centroids(rng, spec)
    turns = _build_turns(rng, spec)
    _insert_overlap(rng, spec, turns)

    speaker_names = [f"S{i}" for i in range(spec.n_speakers)]
    entries = [((s * fp, e * fp), speaker_names[spk]) for s, e, spk in turns]
    reference = Annotation(entries)
    speech = reference.speech()

    n_frames = int(round(spec.length / fp))
    vad_values = np.zeros(n_frames)
    osd_values = np.zeros(n_frames)
    cover = np.zeros(n_frames, dtype=np.int32)
    for s, e, _ in turns:
        cover[s:e] += 1
    vad_values[cover >= 1] = 1.0
    osd_values[cover >= 2] = 1.0

    speaker_timelines = {name: reference.timeline(name) for name in speaker_names}
    scales = []
    for scale_index, scale in enumerate(config.scales):
        segments = segment_timeline(speech, scale, scale_index)
        times = np.array(
            [[seg.interval.start, seg.interval.end] for seg in segments], dtype=np.float64
        ).reshape(len(segments), 2)
        vectors = np.empty((len(segments), spec.dim), dtype=np.float64)
        for row, seg in enumerate(segments):
            window = Timeline([seg.interval])
            shares = np.array([
                speaker_timelines[name].intersect(window).duration()
                for name in speaker_names
            ])
            total = shares.sum()
            mixture = centroids.T @ (shares / total) if total > 0 else np.zeros(spec.dim)
            vectors[row] = mixture + rng.normal(0.0, spec.noise_scale, size=spec.dim)
        scales.append(ScaleEmbeddings(scale, times, vectors.astype(np.float32)))

    recording_id = f"synth-{spec.seed:08d}"
    features = FeatureSet(
        recording_id=recording_id,
        frame_period=fp,
        tracks={
            "vad0": PosteriorTrack(fp, vad_values),
            "osd0": PosteriorTrack(fp, osd_values),
        },
        scales=scales,
    )
    overlap_tl = _overlap_timeline(cover, fp)
    return SynthResult(recording_id, features, reference, speech, overlap_tl)


def _overlap_timeline(cover: np.ndarray, fp: float) -> Timeline:
    spans = []
    start = None
    for i, c in enumerate(cover):
        if c >= 2 and start is None:
            start = i
        elif c < 2 and start is not None:
            spans.append((start * fp, i * fp))
            start = None
    if start is not None:
        spans.append((start * fp, len(cover) * fp))
    return Timeline(spans)
