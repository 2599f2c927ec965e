import numpy as np
import pytest

from diarkit.affinity import align_to_base, cosine_affinity, fuse_affinities, sparsify_top_k
from diarkit.errors import ConfigError, ValidationError


class TestCosineAffinity:
    def test_identical_vectors(self):
        a = cosine_affinity(np.array([[1.0, 0.0], [1.0, 0.0]]))
        assert a[0, 1] == pytest.approx(1.0)

    def test_orthogonal_vectors(self):
        a = cosine_affinity(np.array([[1.0, 0.0], [0.0, 1.0]]))
        assert a[0, 1] == pytest.approx(0.0)

    def test_halfway(self):
        a = cosine_affinity(np.array([[1.0, 0.0], [1.0, 1.0]]))
        assert a[0, 1] == pytest.approx(1 / np.sqrt(2), abs=1e-6)

    def test_zero_row_rejected_with_index(self):
        with pytest.raises(ValidationError, match="row 1"):
            cosine_affinity(np.array([[1.0, 0.0], [0.0, 0.0]]))

    def test_diagonal_exactly_one(self):
        rng = np.random.default_rng(0)
        a = cosine_affinity(rng.normal(size=(10, 7)))
        assert (np.diag(a) == 1.0).all()

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(1)
        a = cosine_affinity(rng.normal(size=(20, 5)))
        np.testing.assert_array_equal(a, a.T)
        assert a.min() >= -1.0 and a.max() <= 1.0

    def test_row_scale_invariance(self):
        rng = np.random.default_rng(2)
        e = rng.normal(size=(8, 6))
        scaled = e.copy()
        scaled[3] *= 7.3
        np.testing.assert_allclose(cosine_affinity(e), cosine_affinity(scaled), atol=1e-6)

    def test_single_row(self):
        a = cosine_affinity(np.array([[3.0, 4.0]]))
        np.testing.assert_array_equal(a, [[1.0]])


class TestFuseAffinities:
    def test_identical_inputs_fixed_point(self):
        rng = np.random.default_rng(3)
        m = cosine_affinity(rng.normal(size=(6, 4)))
        fused = fuse_affinities([m, m, m], [0.2, 0.5, 0.3])
        np.testing.assert_allclose(fused, m, atol=1e-12)

    def test_degenerate_weights_select_one(self):
        rng = np.random.default_rng(4)
        a = cosine_affinity(rng.normal(size=(5, 4)))
        b = cosine_affinity(rng.normal(size=(5, 4)))
        fused = fuse_affinities([a, b, b], [1.0, 0.0, 0.0])
        np.testing.assert_allclose(fused, a, atol=1e-12)

    def test_arithmetic(self):
        a = np.array([[1.0, 0.2], [0.2, 1.0]])
        b = np.array([[1.0, 0.6], [0.6, 1.0]])
        fused = fuse_affinities([a, b], [1, 1])
        assert fused[0, 1] == pytest.approx(0.4)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            fuse_affinities([np.ones((2, 2)), np.ones((3, 3))], [1, 1])

    def test_weight_count_mismatch_rejected(self):
        with pytest.raises(ConfigError):
            fuse_affinities([np.ones((2, 2))], [1, 1])

    def test_output_within_envelope(self):
        rng = np.random.default_rng(5)
        mats = [cosine_affinity(rng.normal(size=(7, 5))) for _ in range(3)]
        fused = fuse_affinities(mats, rng.random(3) + 0.1)
        stack = np.stack(mats)
        off = ~np.eye(7, dtype=bool)
        assert (fused[off] <= stack.max(axis=0)[off] + 1e-12).all()
        assert (fused[off] >= stack.min(axis=0)[off] - 1e-12).all()

    def test_determinism(self):
        rng = np.random.default_rng(6)
        embs = [rng.normal(size=(9, 4)) for _ in range(2)]
        w = [0.7, 0.3]
        first = fuse_affinities([cosine_affinity(e) for e in embs], w)
        second = fuse_affinities([cosine_affinity(e) for e in embs], w)
        assert first.tobytes() == second.tobytes()


class TestAlignToBase:
    def test_expansion(self):
        m = np.array([[1.0, 0.5], [0.5, 1.0]])
        out = align_to_base(m, np.array([0, 0, 1]))
        assert out.shape == (3, 3)
        assert out[0, 1] == 1.0 and out[0, 2] == 0.5

    def test_bad_index_rejected(self):
        with pytest.raises(ValidationError):
            align_to_base(np.eye(2), np.array([0, 2]))


class TestSparsify:
    def test_keeps_strongest(self):
        rng = np.random.default_rng(7)
        a = cosine_affinity(rng.normal(size=(8, 5)))
        out = sparsify_top_k(a, 3)
        assert (np.diag(out) == 1.0).all()
        np.testing.assert_array_equal(out, out.T)
        assert (out != 0).sum() <= 8 * (2 * 3 + 1)

    def test_k_at_least_n_is_copy(self):
        a = cosine_affinity(np.random.default_rng(8).normal(size=(4, 3)))
        np.testing.assert_array_equal(sparsify_top_k(a, 10), a)
