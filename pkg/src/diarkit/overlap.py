"""Second-speaker assignment inside detected overlap regions.

The overlap posterior is binarized like speech, restricted to speech, and
each overlapped slice then gains the best non-primary cluster, ranked by
cosine similarity between cluster centroids and the local segment embedding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .timeline import Annotation, TimeInterval, Timeline
from .vad import BinarizeParams, PosteriorTrack, binarize


@dataclass(frozen=True)
class OverlapAssignParams:
    enabled: bool = True
    binarize: BinarizeParams = field(default_factory=BinarizeParams)


def detect_overlap(osd_track: PosteriorTrack, params: BinarizeParams,
                   speech: Timeline) -> Timeline:
    """Binarized overlap regions, clipped to speech (overlap implies speech)."""
    return binarize(osd_track, params).intersect(speech)


def assign_second_speaker(
    diar: Annotation,
    overlap: Timeline,
    base_segments: list[TimeInterval],
    labels: np.ndarray,
    base_embeddings: np.ndarray,
    speaker_names: dict[int, str] | None = None,
) -> tuple[Annotation, int]:
    """Add one extra speaker over each overlapped slice of ``diar``.

    ``base_segments`` must be disjoint and aligned 1:1 with ``labels`` and
    ``base_embeddings`` rows. Each overlap interval is processed per base
    segment it touches: the slice keeps its primary cluster (the segment's
    label) and gains the other cluster whose centroid is most cosine-similar
    to the segment's embedding. Ties go to the lower cluster index. Returns
    the grown annotation plus the count of overlap slices skipped because no
    base segment contained their midpoint. Idempotent: non-overlap time is
    untouched and re-running adds nothing new.
    """
    labels = np.asarray(labels)
    if len(base_segments) != len(labels) or len(labels) != len(base_embeddings):
        raise ValidationError(
            "base_segments, labels and base_embeddings must be aligned 1:1"
        )
    n_clusters = int(labels.max()) + 1 if len(labels) else 0
    if not overlap or n_clusters < 2:
        return diar, 0
    if speaker_names is None:
        speaker_names = {c: f"spk{c:02d}" for c in range(n_clusters)}

    centroids = np.stack([
        np.asarray(base_embeddings, dtype=np.float64)[labels == c].mean(axis=0)
        for c in range(n_clusters)
    ])
    centroid_norms = np.linalg.norm(centroids, axis=1)

    starts = [seg.start for seg in base_segments]
    order = np.argsort(starts, kind="stable")
    segments = [base_segments[i] for i in order]
    seg_labels = labels[order]
    seg_vectors = np.asarray(base_embeddings, dtype=np.float64)[order]

    additions = []
    skipped = 0
    for interval in overlap:
        pieces = _split_by_segments(interval, segments)
        if not pieces:
            skipped += 1
            continue
        for seg_idx, piece in pieces:
            primary = int(seg_labels[seg_idx])
            vec = seg_vectors[seg_idx]
            norm = np.linalg.norm(vec)
            if norm < 1e-12:
                skipped += 1
                continue
            sims = centroids @ vec / (centroid_norms * norm)
            sims[primary] = -np.inf
            second = int(np.argmax(sims))
            additions.append((piece, speaker_names[second]))
    if not additions:
        return diar, skipped
    return diar.merged_with(additions), skipped


def _split_by_segments(interval: TimeInterval,
                       segments: list[TimeInterval]) -> list[tuple[int, TimeInterval]]:
    """Clip an overlap interval to each base segment it intersects."""
    out = []
    for idx, seg in enumerate(segments):
        piece = interval.intersection(seg)
        if piece is not None:
            out.append((idx, piece))
    return out
