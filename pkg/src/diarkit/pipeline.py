"""Per-recording diarization: the stage wiring from features to speakers.

Stages run in fixed order: VAD ensemble fusion -> binarization -> segment
selection against the feature file's per-scale tables -> per-scale cosine
affinity -> weighted fusion -> average-linkage clustering -> label tiling ->
optional second-speaker assignment inside detected overlap.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .affinity import align_to_base, cosine_affinity, fuse_affinities, sparsify_top_k
from .clustering import ahc
from .config import PipelineConfig
from .errors import DiarkitError, PipelineError
from .formats import FeatureSet, read_features
from .overlap import assign_second_speaker, detect_overlap
from .segmenter import build_scale_map, match_segments, segment_timeline
from .timeline import Annotation, TimeInterval, Timeline
from .vad import fuse_posteriors, binarize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RecordingResult:
    recording_id: str
    annotation: Annotation
    speech: Timeline
    n_base_segments: int
    n_clusters: int
    overlap_duration: float = 0.0
    overlap_skipped: int = 0

    def stats(self) -> dict:
        return {
            "recording_id": self.recording_id,
            "speech_s": round(self.speech.duration(), 3),
            "n_base_segments": self.n_base_segments,
            "n_clusters": self.n_clusters,
            "overlap_s": round(self.overlap_duration, 3),
            "overlap_skipped": self.overlap_skipped,
        }


@dataclass
class DiarizeOutcome:
    results: list[RecordingResult] = field(default_factory=list)
    failures: dict[str, str] = field(default_factory=dict)

    def annotations(self) -> dict[str, Annotation]:
        return {r.recording_id: r.annotation for r in self.results}


def _empty_result(fs: FeatureSet) -> RecordingResult:
    return RecordingResult(fs.recording_id, Annotation(), Timeline(), 0, 0)


def _validate_scales(fs: FeatureSet, cfg: PipelineConfig) -> None:
    file_scales = fs.scale_specs()
    if len(file_scales) != len(cfg.scales):
        raise PipelineError(
            f"{fs.recording_id}: config has {len(cfg.scales)} scales, "
            f"file has {len(file_scales)}"
        )
    for idx, (want, got) in enumerate(zip(cfg.scales, file_scales)):
        if not want.matches(got):
            raise PipelineError(
                f"{fs.recording_id}: scale {idx} mismatch: config "
                f"({want.window}, {want.shift}) vs file ({got.window}, {got.shift})"
            )
    if cfg.frame_period is not None and abs(fs.frame_period - cfg.frame_period) > 1e-9:
        raise PipelineError(
            f"{fs.recording_id}: frame_period {fs.frame_period} != configured "
            f"{cfg.frame_period}"
        )


def _validate_grid(fs: FeatureSet, cfg: PipelineConfig, speech: Timeline) -> None:
    """Optional check that file segment tables follow the windowing rule."""
    if cfg.validate_segments == "off":
        return
    if cfg.validate_segments == "speech":
        scope = speech
    else:
        last = max((len(t) for t in fs.tracks.values()), default=0)
        scope = Timeline([(0.0, last * fs.frame_period)]) if last else Timeline()
    for idx, se in enumerate(fs.scales):
        derived = segment_timeline(scope, se.scale, idx)
        try:
            match_segments(derived, se.times)
        except DiarkitError as exc:
            raise PipelineError(
                f"{fs.recording_id}: scale {idx} table does not match the "
                f"{cfg.validate_segments}-derived grid: {exc}"
            )


def _select_rows(se, speech: Timeline) -> np.ndarray:
    centers = se.times.mean(axis=1)
    keep = [i for i, c in enumerate(centers) if speech.covers(float(c))]
    return np.asarray(keep, dtype=np.int64)


def _tile(intervals: list[TimeInterval]) -> list[TimeInterval]:
    """Disjoint label tiles, one per base segment.

    Within each run of touching segments, cut points sit midway between
    consecutive window centers, so every tile is the stretch of time closest
    to its own window's center.
    """
    tiles: list[TimeInterval] = []
    run: list[TimeInterval] = []

    def flush():
        if not run:
            return
        cuts = [run[0].start]
        for left, right in zip(run[:-1], run[1:]):
            cuts.append(0.5 * (left.middle + right.middle))
        cuts.append(run[-1].end)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            tiles.append(TimeInterval(lo, hi))

    for iv in intervals:
        if run and iv.start > run[-1].end + 1e-9:
            flush()
            run = []
        run.append(iv)
    flush()
    return tiles


def speaker_name(cluster: int) -> str:
    return f"spk{cluster:02d}"


def diarize_recording(fs: FeatureSet, cfg: PipelineConfig) -> RecordingResult:
    """Run all pipeline stages for one recording."""
    _validate_scales(fs, cfg)

    vad_names = fs.track_names("vad")
    if not vad_names:
        raise PipelineError(f"{fs.recording_id}: no vad posterior tracks")
    vad_tracks = [fs.tracks[n] for n in vad_names]
    weights = cfg.vad.weights if cfg.vad.weights is not None else [1.0] * len(vad_tracks)
    if len(weights) != len(vad_tracks):
        raise PipelineError(
            f"{fs.recording_id}: {len(weights)} vad weights for {len(vad_tracks)} tracks"
        )
    fused = fuse_posteriors(vad_tracks, weights)
    speech = binarize(fused, cfg.vad.binarize)
    if not speech:
        return _empty_result(fs)

    _validate_grid(fs, cfg, speech)

    base_idx = cfg.base_scale_index
    selected = {idx: _select_rows(se, speech) for idx, se in enumerate(fs.scales)}
    if selected[base_idx].size == 0:
        return _empty_result(fs)
    for idx, rows in selected.items():
        if rows.size == 0:
            raise PipelineError(
                f"{fs.recording_id}: no scale-{idx} segments fall inside speech"
            )

    base_se = fs.scales[base_idx]
    base_rows = selected[base_idx]
    base_times = base_se.times[base_rows]
    base_vectors = base_se.vectors[base_rows]

    per_scale = []
    for idx, se in enumerate(fs.scales):
        rows = selected[idx]
        matrix = cosine_affinity(se.vectors[rows])
        if idx != base_idx:
            mapping = build_scale_map(base_times, se.times[rows])
            matrix = align_to_base(matrix, mapping)
        per_scale.append(matrix)
    fused_affinity = fuse_affinities(per_scale, cfg.fusion_weights)
    if cfg.sparsify_top_k is not None:
        fused_affinity = sparsify_top_k(fused_affinity, cfg.sparsify_top_k)

    result = ahc(fused_affinity, cfg.clustering)
    labels = result.labels

    base_intervals = [TimeInterval(float(s), float(e)) for s, e in base_times]
    tiles = _tile(base_intervals)
    annotation = Annotation(
        (tile, speaker_name(int(lab))) for tile, lab in zip(tiles, labels)
    )

    overlap_duration = 0.0
    skipped = 0
    osd_names = fs.track_names("osd")
    if cfg.overlap.enabled and osd_names:
        osd = fuse_posteriors([fs.tracks[n] for n in osd_names],
                              [1.0] * len(osd_names))
        overlap_tl = detect_overlap(osd, cfg.overlap.binarize, speech)
        overlap_duration = overlap_tl.duration()
        if overlap_tl:
            annotation, skipped = assign_second_speaker(
                annotation, overlap_tl, tiles, labels, base_vectors,
            )
            if skipped:
                log.warning("%s: %d overlap slices had no owning segment",
                            fs.recording_id, skipped)
    elif cfg.overlap.enabled and not osd_names:
        log.info("%s: overlap enabled but file has no osd tracks", fs.recording_id)

    return RecordingResult(
        recording_id=fs.recording_id,
        annotation=annotation,
        speech=speech,
        n_base_segments=len(base_rows),
        n_clusters=result.n_clusters,
        overlap_duration=overlap_duration,
        overlap_skipped=skipped,
    )


def run_diarize(paths: list, cfg: PipelineConfig, jobs: int = 1) -> DiarizeOutcome:
    """Diarize many feature files; results are collated sorted by id."""
    outcome = DiarizeOutcome()

    def work(path):
        fs = read_features(path)
        return diarize_recording(fs, cfg)

    if jobs <= 1 or len(paths) <= 1:
        pending = [(path, None) for path in paths]
    else:
        pool = ThreadPoolExecutor(max_workers=jobs)
        pending = [(path, pool.submit(work, path)) for path in paths]

    for path, fut in pending:
        try:
            outcome.results.append(work(path) if fut is None else fut.result())
        except (DiarkitError, OSError) as exc:
            log.error("failed on %s: %s", path, exc)
            outcome.failures[str(path)] = str(exc)
    if jobs > 1 and len(paths) > 1:
        pool.shutdown()

    outcome.results.sort(key=lambda r: r.recording_id)
    return outcome
