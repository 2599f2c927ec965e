"""Segment-pair similarity matrices and their fusion across scales.

Affinity matrices are plain square ``numpy`` arrays: symmetric, entries in
[-1, 1], diagonal set (not computed) to exactly 1.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, ValidationError

ZERO_NORM = 1e-12


def cosine_affinity(embeddings: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarity of embedding rows.

    Rows with near-zero norm are rejected; the result is exactly symmetric,
    clamped to [-1, 1] against rounding, with unit diagonal.
    """
    e = np.asarray(embeddings, dtype=np.float64)
    if e.ndim != 2:
        raise ValidationError(f"embeddings must be 2-d, got shape {e.shape}")
    norms = np.linalg.norm(e, axis=1)
    bad = np.where(norms < ZERO_NORM)[0]
    if bad.size:
        raise ValidationError(f"zero-norm embedding row {int(bad[0])}")
    unit = e / norms[:, None]
    sim = unit @ unit.T
    sim = 0.5 * (sim + sim.T)
    np.clip(sim, -1.0, 1.0, out=sim)
    np.fill_diagonal(sim, 1.0)
    return sim


def align_to_base(matrix: np.ndarray, mapping: np.ndarray) -> np.ndarray:
    """Expand a coarse-scale affinity to base index space via a scale map."""
    mapping = np.asarray(mapping)
    if mapping.size and (mapping.min() < 0 or mapping.max() >= matrix.shape[0]):
        raise ValidationError("scale map index out of range")
    return matrix[np.ix_(mapping, mapping)]


def fuse_affinities(per_scale: list[np.ndarray], weights) -> np.ndarray:
    """Weighted entrywise mean of base-aligned per-scale affinities.

    Weights are normalized to sum to one; the result is re-symmetrized and
    its diagonal forced to 1.
    """
    if not per_scale:
        raise ConfigError("fuse_affinities needs at least one matrix")
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or len(w) != len(per_scale):
        raise ConfigError(f"expected {len(per_scale)} fusion weights, got {w.shape}")
    if (w < 0).any():
        raise ConfigError("fusion weights must be nonnegative")
    total = w.sum()
    if total <= 0:
        raise ConfigError("fusion weights must not all be zero")
    n = per_scale[0].shape[0]
    for m in per_scale:
        if m.shape != (n, n):
            raise ValidationError(f"affinity shape mismatch: {m.shape} vs ({n}, {n})")
    fused = np.zeros((n, n), dtype=np.float64)
    for m, wt in zip(per_scale, w / total):
        fused += wt * np.asarray(m, dtype=np.float64)
    fused = 0.5 * (fused + fused.T)
    np.fill_diagonal(fused, 1.0)
    return fused


def sparsify_top_k(matrix: np.ndarray, k: int) -> np.ndarray:
    """Keep the k strongest entries per row, zero the rest, re-symmetrize.

    Optional refinement hook; the default pipeline leaves it off.
    """
    if k < 1:
        raise ConfigError(f"sparsify k must be >= 1, got {k}")
    a = np.asarray(matrix, dtype=np.float64)
    n = a.shape[0]
    if k >= n:
        return a.copy()
    kept = np.zeros_like(a)
    idx = np.argsort(-a, axis=1, kind="stable")[:, :k]
    rows = np.repeat(np.arange(n), k)
    kept[rows, idx.ravel()] = a[rows, idx.ravel()]
    kept = 0.5 * (kept + kept.T)
    np.fill_diagonal(kept, 1.0)
    return kept
