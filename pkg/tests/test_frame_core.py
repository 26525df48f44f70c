import math

import numpy as np
import pytest

from framelab import VectorSystem, frame_bounds, frame_operator, frame_potential, gram_matrix
from framelab.frame_core import frame_eigenvalues, frame_rank, is_tight, max_coherence2, tightness_defect
from framelab.untf import harmonic_frame


def test_vector_system_validation():
    with pytest.raises(ValueError):
        VectorSystem([[1.0, float("nan")]])
    with pytest.raises(ValueError):
        VectorSystem([1.0, 2.0])
    with pytest.raises(ValueError):
        VectorSystem(np.zeros((0, 2)))
    vs = VectorSystem([[3.0, 4.0]])
    assert (vs.count, vs.dim) == (1, 2)
    assert vs.norms2[0] == 25.0
    with pytest.raises(ValueError):
        vs.vectors[0, 0] = 1.0


def test_vector_system_copies_input():
    a = np.eye(2)
    vs = VectorSystem(a)
    a[0, 0] = 5.0
    assert vs.vectors[0, 0] == 1.0


class TestGram:
    def test_orthonormal(self, onb2):
        np.testing.assert_array_equal(gram_matrix(onb2), np.eye(2))

    def test_mercedes(self, mercedes):
        G = gram_matrix(mercedes)
        np.testing.assert_allclose(np.diag(G), 1.0, rtol=1e-15)
        off = G[~np.eye(3, dtype=bool)]
        np.testing.assert_allclose(off, -0.5, rtol=1e-15)

    def test_single_vector(self):
        assert gram_matrix(VectorSystem([[2.0, 0.0]])).tolist() == [[4.0]]

    def test_symmetric_psd_rank(self, corpus):
        for vs in corpus[:50]:
            G = gram_matrix(vs)
            assert np.array_equal(G, G.T)
            w = np.linalg.eigvalsh(G)
            scale = max(np.abs(w).max(), 1.0)
            assert w.min() >= -1e-12 * scale
            assert np.count_nonzero(w > 1e-10 * scale) <= vs.dim


class TestFrameOperator:
    def test_orthonormal(self, onb2):
        fo = frame_operator(onb2)
        np.testing.assert_array_equal(fo.entries, np.eye(2))
        assert fo.trace == 2.0 and fo.tight_constant == 1.0

    def test_mercedes_is_three_halves_identity(self, mercedes):
        np.testing.assert_allclose(frame_operator(mercedes).entries, 1.5 * np.eye(2), atol=1e-15)

    def test_square_frame(self, square_frame):
        fo = frame_operator(square_frame)
        np.testing.assert_array_equal(fo.entries, 2 * np.eye(2))
        # lambda = N/d for a unit-norm tight frame
        assert fo.tight_constant == 4 / 2

    def test_trace_identity(self, corpus):
        for vs in corpus:
            fo = frame_operator(vs)
            total = math.fsum(vs.norms2.tolist())
            assert abs(fo.trace - total) <= 1e-10 * total
            assert abs(np.trace(fo.entries) - total) <= 1e-10 * total


class TestFramePotential:
    def test_orthonormal_basis(self):
        for d in range(1, 6):
            assert frame_potential(VectorSystem(np.eye(d))) == d

    def test_square_frame(self, square_frame):
        assert frame_potential(square_frame) == 8.0

    def test_duality(self, corpus):
        for vs in corpus:
            fp = frame_potential(vs)
            G = vs.vectors @ vs.vectors.T
            A = vs.vectors.T @ vs.vectors
            assert abs(fp - np.sum(G * G)) <= 1e-9 * fp
            assert abs(fp - np.sum(A * A)) <= 1e-9 * fp

    def test_unit_norm_lower_bound(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            d = int(rng.integers(1, 5))
            N = int(rng.integers(d, 10))
            V = rng.standard_normal((N, d))
            V /= np.linalg.norm(V, axis=1)[:, None]
            vs = VectorSystem(V)
            lb = N * N / d
            fp = frame_potential(vs)
            assert fp >= lb - 1e-9 * lb
            # the excess over N^2/d is exactly the squared distance of A from (N/d) I
            A = vs.vectors.T @ vs.vectors
            excess = np.sum((A - (N / d) * np.eye(d)) ** 2)
            assert fp - lb == pytest.approx(excess, abs=1e-9 * lb)
            if d > 1:
                assert (abs(fp - lb) <= 1e-8 * lb) == (tightness_defect(vs) <= 1e-6)

    def test_unit_norm_bound_attained_by_tight_frames(self):
        for N in range(2, 9):
            vs = harmonic_frame(N)
            assert frame_potential(vs) == pytest.approx(N * N / 2, rel=1e-12)


class TestFrameBounds:
    def test_orthonormal(self, onb2):
        assert frame_bounds(onb2) == (1.0, 1.0)

    def test_mercedes(self, mercedes):
        lo, hi = frame_bounds(mercedes)
        assert lo == pytest.approx(1.5, rel=1e-14) and hi == pytest.approx(1.5, rel=1e-14)

    def test_rank_one(self):
        assert frame_bounds(VectorSystem([[1.0, 0.0], [2.0, 0.0]])) == (0.0, 5.0)

    def test_quadratic_form_bounds(self, corpus):
        rng = np.random.default_rng(11)
        for vs in corpus[:50]:
            lo, hi = frame_bounds(vs)
            for _ in range(10):
                w = rng.standard_normal(vs.dim)
                q = np.sum((vs.vectors @ w) ** 2)
                n = w @ w
                assert lo * n - 1e-9 * hi * n <= q <= hi * n * (1 + 1e-9)

    def test_spanning_iff_full_rank(self, corpus):
        for vs in corpus:
            lo, _ = frame_bounds(vs)
            rank = np.linalg.matrix_rank(vs.vectors)
            assert (lo > 0) == (frame_rank(vs) == vs.dim) == (rank == vs.dim)

    def test_spectra_of_gram_and_frame_operator_agree(self, corpus):
        for vs in corpus:
            wa = frame_eigenvalues(vs)
            wg = np.linalg.eigvalsh(gram_matrix(vs))
            top = max(wa.max(), 1.0)
            wa = np.sort(wa[wa > 1e-10 * top])
            wg = np.sort(wg[wg > 1e-10 * top])
            assert wa.shape == wg.shape
            np.testing.assert_allclose(wa, wg, rtol=1e-8, atol=1e-12 * top)


class TestTightness:
    def test_square_frame(self, square_frame):
        assert tightness_defect(square_frame) == 0.0

    def test_orthonormal(self):
        assert tightness_defect(VectorSystem(np.eye(4))) == 0.0

    def test_repeated_vector(self):
        assert tightness_defect(VectorSystem([[1.0, 0.0], [1.0, 0.0]])) == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_zero_system_rejected(self):
        with pytest.raises(ValueError):
            tightness_defect(VectorSystem(np.zeros((3, 2))))

    def test_is_tight(self, mercedes):
        assert is_tight(mercedes)
        assert not is_tight(VectorSystem([[1.0, 0.0], [1.0, 0.1]]))


def test_max_coherence2(mercedes):
    assert max_coherence2(mercedes) == pytest.approx(0.25, rel=1e-14)
    assert max_coherence2(VectorSystem([[1.0, 0.0]])) == 0.0
