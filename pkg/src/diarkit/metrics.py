"""Overlap-aware diarization error rate.

Errors are accounted per second with speaker multiplicity, the way the
classic NIST md-eval scorer does: at every instant the reference speaker
count is compared with the (optimally mapped) hypothesis speaker count, so
overlapped regions are scored correctly. Speaker mapping maximizes total
ref/hyp overlap duration via optimal assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ValidationError
from .timeline import Annotation, TimeInterval, Timeline


@dataclass(frozen=True)
class ScoringParams:
    """Scoring controls.

    ``collar`` excludes [b - collar, b + collar] around every reference
    segment boundary b (total forgiveness width 2*collar). With
    ``score_overlap`` off, reference regions with two or more simultaneous
    speakers are excluded entirely.
    """

    collar: float = 0.25
    score_overlap: bool = True

    def __post_init__(self):
        if self.collar < 0:
            raise ValidationError(f"collar must be >= 0, got {self.collar}")


@dataclass(frozen=True)
class DerBreakdown:
    """Error components in seconds plus the resulting rate."""

    missed: float
    false_alarm: float
    confusion: float
    scored: float

    @property
    def der(self) -> float:
        total = self.missed + self.false_alarm + self.confusion
        if self.scored <= 0:
            if total <= 0:
                return 0.0
            raise ValidationError("DER undefined: errors present but scored time is zero")
        return total / self.scored

    def as_dict(self) -> dict[str, float]:
        return {
            "missed": self.missed,
            "false_alarm": self.false_alarm,
            "confusion": self.confusion,
            "scored": self.scored,
            "der": self.der,
        }


def combine_breakdowns(parts: list[DerBreakdown]) -> DerBreakdown:
    """Corpus aggregate: sum components, divide once at the end."""
    return DerBreakdown(
        missed=sum(p.missed for p in parts),
        false_alarm=sum(p.false_alarm for p in parts),
        confusion=sum(p.confusion for p in parts),
        scored=sum(p.scored for p in parts),
    )


def scoring_regions(ref: Annotation, uem: Timeline, params: ScoringParams) -> Timeline:
    """Evaluable time: the UEM minus collars around reference boundaries."""
    if params.collar <= 0:
        return uem
    collars = []
    for interval, _ in ref.itertracks():
        for b in (interval.start, interval.end):
            collars.append((max(0.0, b - params.collar), b + params.collar))
    return uem.subtract(Timeline(collars))


def overlap_regions(ann: Annotation) -> Timeline:
    """Time where two or more speakers are simultaneously active."""
    boundaries = _boundaries([ann])
    out = []
    for start, end in zip(boundaries[:-1], boundaries[1:]):
        mid = 0.5 * (start + end)
        count = sum(1 for spk in ann.speakers if ann.timeline(spk).covers(mid, tol=0))
        if count >= 2:
            out.append((start, end))
    return Timeline(out)


def optimal_mapping(ref: Annotation, hyp: Annotation, scope: Timeline) -> dict[str, str]:
    """One-to-one partial map hyp speaker -> ref speaker of maximal overlap.

    Computed by optimal assignment over the pairwise overlap-duration matrix
    within ``scope``; hyp speakers with zero overlap stay unmapped.
    """
    ref_c = ref.crop(scope)
    hyp_c = hyp.crop(scope)
    ref_speakers = list(ref_c.speakers)
    hyp_speakers = list(hyp_c.speakers)
    if not ref_speakers or not hyp_speakers:
        return {}
    overlap = np.zeros((len(ref_speakers), len(hyp_speakers)))
    for i, r in enumerate(ref_speakers):
        r_tl = ref_c.timeline(r)
        for j, h in enumerate(hyp_speakers):
            overlap[i, j] = r_tl.intersect(hyp_c.timeline(h)).duration()
    rows, cols = linear_sum_assignment(-overlap)
    return {
        hyp_speakers[j]: ref_speakers[i]
        for i, j in zip(rows, cols)
        if overlap[i, j] > 0
    }


def der(ref: Annotation, hyp: Annotation, uem: Timeline,
        params: ScoringParams = ScoringParams()) -> DerBreakdown:
    """Diarization error rate of ``hyp`` against ``ref`` within ``uem``.

    Per elementary time slice: missed is the excess of reference speakers
    over hypothesis speakers, false alarm the symmetric excess, and confusion
    the matched count minus identity agreements under the optimal speaker
    mapping. Scored time is reference speech counted with multiplicity.
    """
    scope = scoring_regions(ref, uem, params)
    if not params.score_overlap:
        scope = scope.subtract(overlap_regions(ref))
    ref_c = ref.crop(scope)
    hyp_c = hyp.crop(scope)
    mapping = optimal_mapping(ref_c, hyp_c, scope)
    hyp_m = hyp_c.rename(_disambiguate(mapping, hyp_c, ref_c))

    missed = false_alarm = confusion = scored = 0.0
    boundaries = _boundaries([ref_c, hyp_m])
    ref_tls = {spk: ref_c.timeline(spk) for spk in ref_c.speakers}
    hyp_tls = {spk: hyp_m.timeline(spk) for spk in hyp_m.speakers}
    for start, end in zip(boundaries[:-1], boundaries[1:]):
        width = end - start
        mid = 0.5 * (start + end)
        r_active = {spk for spk, tl in ref_tls.items() if tl.covers(mid, tol=0)}
        h_active = {spk for spk, tl in hyp_tls.items() if tl.covers(mid, tol=0)}
        n_ref, n_hyp = len(r_active), len(h_active)
        correct = len(r_active & h_active)
        missed += width * max(0, n_ref - n_hyp)
        false_alarm += width * max(0, n_hyp - n_ref)
        confusion += width * (min(n_ref, n_hyp) - correct)
        scored += width * n_ref
    return DerBreakdown(missed=missed, false_alarm=false_alarm,
                        confusion=confusion, scored=scored)


def _disambiguate(mapping: dict[str, str], hyp: Annotation, ref: Annotation) -> dict[str, str]:
    """Rename unmapped hyp speakers so they can never collide with ref names."""
    taken = set(ref.speakers) | set(mapping.values())
    out = dict(mapping)
    for spk in hyp.speakers:
        if spk in mapping:
            continue
        name = spk
        while name in taken:
            name = "#" + name
        out[spk] = name
        taken.add(name)
    return out


def _boundaries(annotations: list[Annotation]) -> list[float]:
    points: set[float] = set()
    for ann in annotations:
        for interval, _ in ann.itertracks():
            points.add(interval.start)
            points.add(interval.end)
    return sorted(points)
