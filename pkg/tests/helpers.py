"""Independent oracles and random-case generators shared by the test suite.

Everything here recomputes expected values from first principles (frame
rasterization, exhaustive permutations, greedy re-scans over the original
matrix) and never calls the code paths under test.
"""

from __future__ import annotations

import itertools

import numpy as np

from diarkit.timeline import Annotation, Timeline

# ---------------------------------------------------------------------------
# Frame rasterization (timeline oracle)
# ---------------------------------------------------------------------------

def rasterize(tl: Timeline, fp: float = 0.001) -> frozenset[int]:
    """Frame indices whose centers fall inside the timeline."""
    frames: set[int] = set()
    for iv in tl:
        k_lo = int(np.ceil(iv.start / fp - 0.5))
        k_hi = int(np.ceil(iv.end / fp - 0.5))
        frames.update(range(k_lo, k_hi))
    return frozenset(frames)


def raster_duration(frames: frozenset[int], fp: float = 0.001) -> float:
    return len(frames) * fp


def random_timeline(rng: np.random.Generator, max_t: float = 100.0,
                    max_intervals: int = 6) -> Timeline:
    n = int(rng.integers(0, max_intervals + 1))
    spans = []
    for _ in range(n):
        start = rng.uniform(0, max_t - 1.0)
        spans.append((start, start + rng.uniform(0.05, max_t / 3)))
    return Timeline(spans)


# ---------------------------------------------------------------------------
# Annotations on a fixed grid (DER oracle inputs)
# ---------------------------------------------------------------------------

def random_annotation(rng: np.random.Generator, max_speakers: int = 4,
                      max_t: float = 60.0, grid: float = 0.01) -> Annotation:
    """Speakers with independent random turns, endpoints snapped to `grid`."""
    n_speakers = int(rng.integers(1, max_speakers + 1))
    entries = []
    for s in range(n_speakers):
        for _ in range(int(rng.integers(1, 6))):
            start = round(float(rng.uniform(0, max_t - 2.0)) / grid) * grid
            dur = round(float(rng.uniform(0.5, 8.0)) / grid) * grid
            end = min(start + dur, max_t)
            if end - start >= grid:
                entries.append(((start, end), f"spk{s}"))
    return Annotation(entries)


def perturb_annotation(rng: np.random.Generator, ann: Annotation,
                       max_t: float = 60.0, grid: float = 0.01) -> Annotation:
    """A plausible hypothesis: jittered boundaries, renames, random edits."""
    entries = []
    for interval, spk in ann.itertracks():
        if rng.random() < 0.15:
            continue  # deletion
        jitter = lambda: round(float(rng.uniform(-0.8, 0.8)) / grid) * grid
        start = max(0.0, interval.start + jitter())
        end = min(max_t, interval.end + jitter())
        if end - start < grid:
            continue
        name = spk if rng.random() < 0.8 else f"hyp{int(rng.integers(0, 4))}"
        entries.append(((start, end), "h_" + name))
    if rng.random() < 0.3:  # insertion
        start = round(float(rng.uniform(0, max_t - 1.0)) / grid) * grid
        entries.append(((start, start + 1.0), "h_extra"))
    return Annotation(entries)


# ---------------------------------------------------------------------------
# Frame-counting DER oracle
# ---------------------------------------------------------------------------

def der_frame_oracle(ref: Annotation, hyp: Annotation, uem: Timeline,
                     collar: float, score_overlap: bool,
                     fp: float = 0.01) -> tuple[float, float, float, float]:
    """(missed, false_alarm, confusion, scored) by frame counting at `fp`."""
    horizon = 0.0
    for ann in (ref, hyp):
        for iv, _ in ann.itertracks():
            horizon = max(horizon, iv.end)
    for iv in uem:
        horizon = max(horizon, iv.end)
    n = int(np.ceil(horizon / fp)) + 2

    def mask(tl: Timeline) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        for iv in tl:
            k_lo = int(np.ceil(iv.start / fp - 0.5))
            k_hi = int(np.ceil(iv.end / fp - 0.5))
            m[max(0, k_lo):max(0, k_hi)] = True
        return m

    ref_masks = {s: mask(ref.timeline(s)) for s in ref.speakers}
    hyp_masks = {s: mask(hyp.timeline(s)) for s in hyp.speakers}
    scope = mask(uem)

    if collar > 0:
        collar_frames = int(round(collar / fp))
        no_score = np.zeros(n, dtype=bool)
        for m in ref_masks.values():
            edges = np.flatnonzero(np.diff(np.concatenate([[False], m, [False]])))
            for b in edges:
                no_score[max(0, b - collar_frames):b + collar_frames] = True
        scope &= ~no_score

    ref_count = sum((m.astype(int) for m in ref_masks.values()), np.zeros(n, dtype=int))
    if not score_overlap:
        scope &= ref_count < 2

    hyp_count = sum((m.astype(int) for m in hyp_masks.values()), np.zeros(n, dtype=int))

    mapping = brute_force_mapping(
        {r: m & scope for r, m in ref_masks.items()},
        {h: m & scope for h, m in hyp_masks.items()},
    )
    correct = np.zeros(n, dtype=int)
    for h, r in mapping.items():
        correct += (ref_masks[r] & hyp_masks[h]).astype(int)

    nr = np.where(scope, ref_count, 0)
    nh = np.where(scope, hyp_count, 0)
    correct = np.where(scope, correct, 0)
    missed = float(np.maximum(0, nr - nh).sum() * fp)
    false_alarm = float(np.maximum(0, nh - nr).sum() * fp)
    confusion = float((np.minimum(nr, nh) - correct).sum() * fp)
    scored = float(nr.sum() * fp)
    return missed, false_alarm, confusion, scored


def brute_force_mapping(ref_masks: dict[str, np.ndarray],
                        hyp_masks: dict[str, np.ndarray]) -> dict[str, str]:
    """Exhaustive one-to-one map hyp->ref maximizing matched frame counts."""
    refs = sorted(ref_masks)
    hyps = sorted(hyp_masks)
    if not refs or not hyps:
        return {}
    counts = np.array([[int((ref_masks[r] & hyp_masks[h]).sum()) for h in hyps]
                       for r in refs])
    best_total = -1
    best: dict[str, str] = {}
    for pairs in _injective_pairings(len(refs), len(hyps)):
        total = sum(counts[r, h] for r, h in pairs)
        if total > best_total:
            best_total = total
            best = {hyps[h]: refs[r] for r, h in pairs if counts[r, h] > 0}
    return best


def _injective_pairings(n_rows: int, n_cols: int):
    """All maximal one-to-one (row, col) pairings, smaller side exhausted."""
    if n_rows <= n_cols:
        for cols in itertools.permutations(range(n_cols), n_rows):
            yield list(zip(range(n_rows), cols))
    else:
        for rows in itertools.permutations(range(n_rows), n_cols):
            yield list(zip(rows, range(n_cols)))


def brute_force_assignment_total(matrix: np.ndarray) -> float:
    """Maximum total of a one-to-one assignment, by permutation search."""
    n_rows, n_cols = matrix.shape
    return max(
        sum(matrix[r, c] for r, c in pairs)
        for pairs in _injective_pairings(n_rows, n_cols)
    )


# ---------------------------------------------------------------------------
# Greedy average-linkage oracle
# ---------------------------------------------------------------------------

def ahc_oracle(a: np.ndarray, threshold: float, min_speakers: int = 1,
               max_speakers: int = 10**9) -> np.ndarray:
    """Re-scan every cluster pair each step, averages from the original matrix."""
    n = a.shape[0]
    clusters: list[list[int]] = [[i] for i in range(n)]  # kept in creation order
    while len(clusters) > min_speakers:
        best_sim = None
        best_pair = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                sims = [a[p, q] for p in clusters[i] for q in clusters[j]]
                avg = sum(sims) / len(sims)
                if best_sim is None or avg > best_sim:
                    best_sim = avg
                    best_pair = (i, j)
        if best_sim < threshold and len(clusters) <= max_speakers:
            break
        i, j = best_pair
        merged = clusters[i] + clusters[j]
        del clusters[j]
        del clusters[i]
        clusters.append(merged)

    labels = np.empty(n, dtype=np.int64)
    for idx, members in enumerate(clusters):
        for m in members:
            labels[m] = idx
    canonical: dict[int, int] = {}
    out = np.empty(n, dtype=np.int64)
    for pos, lab in enumerate(labels):
        canonical.setdefault(int(lab), len(canonical))
        out[pos] = canonical[int(lab)]
    return out
