"""Average-linkage agglomerative clustering over an affinity matrix.

Linkage averages are always computed from the original matrix entries (via
running cross-cluster sums), not from a mutated distance matrix, so the merge
order is exactly the greedy argmax over true averages and is invariant under
positive affine maps of the similarities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ValidationError


@dataclass(frozen=True)
class ClusterParams:
    """Stopping controls: similarity threshold plus speaker-count bounds."""

    stop_threshold: float = 0.5
    min_speakers: int = 1
    max_speakers: int = 20

    def __post_init__(self):
        if self.min_speakers < 1:
            raise ConfigError(f"min_speakers must be >= 1, got {self.min_speakers}")
        if self.max_speakers < self.min_speakers:
            raise ConfigError(
                f"max_speakers ({self.max_speakers}) < min_speakers ({self.min_speakers})"
            )


@dataclass(frozen=True)
class ClusterResult:
    labels: np.ndarray
    n_clusters: int


def ahc(affinity: np.ndarray, params: ClusterParams) -> ClusterResult:
    """Greedy average-linkage merging with a similarity stopping threshold.

    Starting from singletons, repeatedly merge the cluster pair with maximal
    mean cross-pair similarity. Merging stops once the best pair falls below
    ``stop_threshold`` while the cluster count is within ``max_speakers``
    (merging continues past the threshold to enforce the bound), or when the
    count reaches ``min_speakers``. Ties on the best similarity are broken
    toward the pair that was created earliest.
    """
    a = np.asarray(affinity, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"affinity must be square, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        raise ValidationError("cannot cluster an empty affinity matrix")

    # One slot per original segment; a merge writes the new cluster into the
    # first parent's slot. Creation ids keep growing so tie-breaks follow
    # cluster-creation order regardless of slot reuse.
    cross = a.copy()
    sizes = np.ones(n)
    members: list[list[int]] = [[i] for i in range(n)]
    creation = list(range(n))          # creation id per slot
    active: list[int] = list(range(n)) # slots ordered by creation id
    next_id = n

    while len(active) > params.min_speakers:
        slots = np.array(active)
        avg = cross[np.ix_(slots, slots)] / np.outer(sizes[slots], sizes[slots])
        avg[np.tril_indices(len(slots))] = -np.inf
        flat = int(np.argmax(avg))     # first max in row-major = smallest (i, j)
        best = avg.ravel()[flat]
        if best < params.stop_threshold and len(active) <= params.max_speakers:
            break
        i, j = divmod(flat, len(slots))
        slot_i, slot_j = active[i], active[j]

        sizes[slot_i] += sizes[slot_j]
        cross[slot_i, :] += cross[slot_j, :]
        cross[:, slot_i] += cross[:, slot_j]
        members[slot_i] = members[slot_i] + members[slot_j]
        creation[slot_i] = next_id
        next_id += 1
        active.pop(j)
        active.pop(i)
        active.append(slot_i)          # newest creation id goes last

    labels = np.empty(n, dtype=np.int64)
    for cluster_idx, slot in enumerate(active):
        labels[members[slot]] = cluster_idx
    labels = relabel_by_first_appearance(labels)
    return ClusterResult(labels=labels, n_clusters=len(active))


def relabel_by_first_appearance(labels) -> np.ndarray:
    """Renumber labels 0..k-1 by order of first appearance; idempotent."""
    labels = np.asarray(labels, dtype=np.int64)
    seen: dict[int, int] = {}
    out = np.empty_like(labels)
    for idx, lab in enumerate(labels):
        key = int(lab)
        if key not in seen:
            seen[key] = len(seen)
        out[idx] = seen[key]
    return out
