"""Reference configurations: random feasible systems, orthogonal systems
and (scaled) unit-norm tight frames.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from framelab import kernels
from framelab.frame_core import VectorSystem, as_system, tightness_defect

SEED_MASK = (1 << 64) - 1

#: Number of seeded restarts ``build_untf`` runs.
UNTF_RESTARTS = 8

#: Descent keeps going until this defect (or ``max_iters``), well past any
#: sensible ``defect_tol``; downstream values then carry ~1e-13 error, not 1e-8.
DESCENT_TARGET = 1e-13


def make_rng(seed):
    """Counter-based Philox stream keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) & SEED_MASK))


def random_directions(rng, N, d):
    x = rng.standard_normal((N, d))
    n = np.linalg.norm(x, axis=1)
    while np.any(n == 0.0):  # pragma: no cover - probability zero
        bad = n == 0.0
        x[bad] = rng.standard_normal((int(bad.sum()), d))
        n = np.linalg.norm(x, axis=1)
    return x / n[:, None]


def random_system(d, N, constraints, seed):
    """N vectors with uniformly random directions and |v|^2 ~ U[c1, c2]."""
    if d < 1 or N < 1:
        raise ValueError(f"need d >= 1 and N >= 1, got d={d}, N={N}")
    rng = make_rng(seed)
    u = random_directions(rng, N, d)
    n2 = rng.uniform(constraints.c1, constraints.c2, size=N)
    return VectorSystem(u * np.sqrt(n2)[:, None])


def orthonormal_system(d, N, norms2=None):
    """First N scaled standard basis vectors of R^d with squared norms ``norms2``."""
    if N > d:
        raise ValueError(f"at most d={d} pairwise orthogonal nonzero vectors exist, asked for {N}")
    if N < 1:
        raise ValueError("N must be positive")
    norms2 = np.ones(N) if norms2 is None else np.asarray(norms2, dtype=np.float64)
    if norms2.shape != (N,):
        raise ValueError(f"expected {N} squared norms, got shape {norms2.shape}")
    if np.any(norms2 <= 0):
        raise ValueError("squared norms must be positive")
    vecs = np.zeros((N, d))
    vecs[np.arange(N), np.arange(N)] = np.sqrt(norms2)
    return VectorSystem(vecs)


def harmonic_frame(N, c=1.0):
    """Planar tight frame of N vectors at angles pi k / N, each with |v|^2 = c."""
    theta = np.pi * np.arange(N) / N
    return VectorSystem(math.sqrt(c) * np.column_stack([np.cos(theta), np.sin(theta)]))


def scale_system(vs, factor):
    if not factor > 0:
        raise ValueError(f"scale factor must be positive, got {factor}")
    return VectorSystem(as_system(vs).vectors * factor)


@dataclass(frozen=True)
class BuildRequest:
    dim: int
    count: int
    target_norm2: float = 1.0
    seed: int = 0
    max_iters: int = 20000
    defect_tol: float = 1e-8

    def __post_init__(self):
        if self.dim < 1 or self.count < self.dim:
            raise ValueError(f"tight frames need N >= d >= 1, got d={self.dim}, N={self.count}")
        if not self.target_norm2 > 0:
            raise ValueError("target_norm2 must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")


class TightFrameNotFound(RuntimeError):
    def __init__(self, request, best_defect):
        super().__init__(
            f"no tight frame within defect {request.defect_tol:g} for d={request.dim}, "
            f"N={request.count} after {UNTF_RESTARTS} restarts (best defect {best_defect:.3e})"
        )
        self.request = request
        self.best_defect = best_defect


def _descend(req, restart):
    d, N, c = req.dim, req.count, req.target_norm2
    rng = make_rng(req.seed + restart)
    V0 = random_directions(rng, N, d) * math.sqrt(c)
    target = min(DESCENT_TARGET, 0.1 * req.defect_tol)
    V, _, _ = kernels.fp_descent(V0, c, 1.0 / (4 * N * c), req.max_iters, target, 10)
    n2 = np.einsum("ij,ij->i", V, V)
    V = V * np.sqrt(c / n2)[:, None]
    vs = VectorSystem(V)
    return vs, tightness_defect(vs)


def build_untf(req, threads=1):
    """Tight frame of ``req.count`` vectors in R^``req.dim`` with every |v|^2 = target_norm2.

    Runs projected frame-potential descent from 8 seeded random starts
    (seed, seed + 1, ...) and keeps the one with the smallest tightness
    defect, ties going to the lowest restart. Raises ``TightFrameNotFound``
    carrying that defect if it exceeds ``req.defect_tol``.
    """
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: _descend(req, r), range(UNTF_RESTARTS)))
    else:
        results = [_descend(req, r) for r in range(UNTF_RESTARTS)]
    # min() keeps the first of equal keys, i.e. the lowest restart index
    vs, defect = min(results, key=lambda item: item[1])
    if defect > req.defect_tol:
        raise TightFrameNotFound(req, defect)
    return vs


def scaled_untf(d, N, c, seed=0, **kwargs):
    """Shorthand for ``build_untf`` with target squared norm c."""
    return build_untf(BuildRequest(dim=d, count=N, target_norm2=c, seed=seed, **kwargs))
