import math

import numpy as np
import pytest

from framelab import (
    BuildRequest,
    NormConstraints,
    TightFrameNotFound,
    VectorSystem,
    build_untf,
    evaluate,
    frame_operator,
    frame_potential,
    harmonic_frame,
    orthonormal_system,
    random_system,
    scale_system,
    tightness_defect,
)
from framelab.frame_core import gram_matrix


class TestRandomSystem:
    def test_deterministic(self):
        c = NormConstraints(1.0, 2.0)
        assert random_system(3, 7, c, 42) == random_system(3, 7, c, 42)
        assert random_system(3, 7, c, 42) != random_system(3, 7, c, 43)

    def test_norms_in_shell(self):
        c = NormConstraints(0.5, 1.5)
        vs = random_system(3, 1000, c, 1)
        assert np.all(vs.norms2 >= 0.5 * (1 - 1e-12)) and np.all(vs.norms2 <= 1.5 * (1 + 1e-12))

    def test_isotropic_on_average(self):
        # E[A] = E|v|^2 N/d I for rotation-invariant directions
        c = NormConstraints(1.0, 3.0)
        d, N = 3, 4
        mean = np.zeros((d, d))
        for s in range(1000):
            mean += frame_operator(random_system(d, N, c, s)).entries
        mean /= 1000
        expected = 2.0 * N / d
        assert np.linalg.norm(mean - expected * np.eye(d)) <= 0.1 * expected * math.sqrt(d)


class TestOrthonormal:
    def test_infinite_ratio(self):
        vs = orthonormal_system(3, 2, [1.0, 1.0])
        np.testing.assert_array_equal(gram_matrix(vs), np.eye(2))
        assert evaluate(vs, 0.0).min_value == math.inf

    def test_prescribed_norms(self):
        vs = orthonormal_system(2, 2, [1.0, 2.0])
        np.testing.assert_allclose(vs.norms2, [1.0, 2.0])
        assert all(r == math.inf for r in evaluate(vs, 0.0).ratios)

    def test_too_many(self):
        with pytest.raises(ValueError):
            orthonormal_system(4, 5)


class TestBuildUNTF:
    def test_square(self):
        vs = build_untf(BuildRequest(2, 4))
        assert tightness_defect(vs) <= 1e-8
        assert evaluate(vs, 0.0).min_value == pytest.approx(1.0, rel=1e-7)

    def test_mercedes_like(self):
        vs = build_untf(BuildRequest(2, 3))
        assert tightness_defect(vs) <= 1e-8
        assert evaluate(vs, 0.0).min_value == pytest.approx(2.0, rel=1e-7)

    def test_scaled_norm(self):
        vs = build_untf(BuildRequest(3, 5, target_norm2=2.0))
        np.testing.assert_allclose(vs.norms2, 2.0, rtol=1e-14)
        np.testing.assert_allclose(frame_operator(vs).entries, 10 / 3 * np.eye(3), atol=1e-7)
        assert frame_potential(vs) == pytest.approx(100 / 3, rel=1e-7)

    @pytest.mark.parametrize("d,N,c", [(2, 5, 1.0), (3, 4, 0.7), (4, 9, 1.5), (5, 11, 1.0)])
    def test_tight_frame_identity(self, d, N, c):
        vs = build_untf(BuildRequest(d, N, target_norm2=c, seed=d * N))
        rng = np.random.default_rng(0)
        for _ in range(50):
            w = rng.standard_normal(d)
            lhs = np.sum((vs.vectors @ w) ** 2)
            assert lhs == pytest.approx(N * c / d * (w @ w), rel=1e-7)
        assert frame_potential(vs) == pytest.approx(N * N * c * c / d, rel=1e-7)

    def test_deterministic(self):
        req = BuildRequest(3, 7, seed=123)
        assert build_untf(req).vectors.tobytes() == build_untf(req).vectors.tobytes()

    def test_threaded_matches_serial(self):
        req = BuildRequest(3, 6, seed=5)
        assert build_untf(req, threads=4) == build_untf(req)

    def test_planar_energies_match_harmonic(self):
        for N in range(3, 10):
            built = build_untf(BuildRequest(2, N, seed=N))
            harm = harmonic_frame(N)
            assert tightness_defect(harm) <= 1e-12
            for k in range(N):
                e = np.sum((built.vectors @ built.vectors[k]) ** 2)
                assert e == pytest.approx(N / 2, rel=1e-7)

    def test_failure_reports_best_defect(self):
        with pytest.raises(TightFrameNotFound) as info:
            build_untf(BuildRequest(3, 7, max_iters=1, defect_tol=1e-14))
        assert info.value.best_defect > 1e-14

    @pytest.mark.parametrize("args", [(3, 2), (0, 1)])
    def test_bad_request(self, args):
        with pytest.raises(ValueError):
            BuildRequest(*args)


class TestScale:
    def test_identity(self, mercedes):
        assert scale_system(mercedes, 1.0) == mercedes

    def test_scaled_untf_is_tight(self):
        vs = scale_system(build_untf(BuildRequest(3, 5)), math.sqrt(0.4))
        np.testing.assert_allclose(vs.norms2, 0.4, rtol=1e-14)
        assert tightness_defect(vs) <= 1e-8

    def test_quartic_potential(self, corpus):
        for vs in corpus[:20]:
            assert frame_potential(scale_system(vs, 1.7)) == pytest.approx(1.7**4 * frame_potential(vs), rel=1e-12)

    def test_bad_factor(self, mercedes):
        with pytest.raises(ValueError):
            scale_system(mercedes, 0.0)
