"""Linear-algebra primitives on finite vector systems in R^d.

A vector system is stored as an ``(N, d)`` array whose rows are the
vectors. With ``L`` that array, the Gram matrix is ``L @ L.T`` and the
frame operator is ``L.T @ L``.
"""

import math
from dataclasses import dataclass

import numpy as np

#: Relative frame-operator defect below which a system counts as tight.
TIGHT_TOL = 1e-8

#: Eigenvalues below ``RANK_TOL * max(largest, 1)`` are treated as zero.
RANK_TOL = 1e-10

#: Reductions over more than this many terms use compensated summation.
FSUM_THRESHOLD = 64


def _sum(values):
    values = np.ravel(values)
    if values.size > FSUM_THRESHOLD:
        return math.fsum(values.tolist())
    return float(np.sum(values))


@dataclass(frozen=True, eq=False)
class VectorSystem:
    """N real vectors of common dimension d, stored row-wise.

    The coordinate array is copied on construction and made read-only,
    so a ``VectorSystem`` can be shared freely.
    """

    vectors: np.ndarray

    def __post_init__(self):
        arr = np.array(self.vectors, dtype=np.float64, copy=True)
        if arr.ndim == 1:
            raise ValueError("vectors must be a 2-d array of shape (N, d)")
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty (N, d) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vector coordinates must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "vectors", arr)

    @property
    def count(self):
        return self.vectors.shape[0]

    @property
    def dim(self):
        return self.vectors.shape[1]

    @property
    def norms2(self):
        """Squared Euclidean norms of the vectors."""
        return np.einsum("ij,ij->i", self.vectors, self.vectors)

    def __len__(self):
        return self.count

    def __eq__(self, other):
        if not isinstance(other, VectorSystem):
            return NotImplemented
        return self.vectors.shape == other.vectors.shape and bool(
            np.array_equal(self.vectors, other.vectors)
        )

    def __hash__(self):
        return hash((self.vectors.shape, self.vectors.tobytes()))

    def transformed(self, matrix):
        """Apply the linear map ``matrix`` (d x d) to every vector."""
        return VectorSystem(self.vectors @ np.asarray(matrix, dtype=np.float64).T)

    def permuted(self, order):
        return VectorSystem(self.vectors[np.asarray(order)])


def as_system(vs):
    """Coerce an array-like or ``VectorSystem`` to ``VectorSystem``."""
    if isinstance(vs, VectorSystem):
        return vs
    return VectorSystem(vs)


@dataclass(frozen=True, eq=False)
class FrameOperator:
    """The d x d frame operator ``sum_i v_i v_i^T`` with its trace.

    ``tight_constant`` is ``trace / d``, the only multiple of the
    identity the operator can equal.
    """

    entries: np.ndarray
    trace: float
    tight_constant: float


def gram_matrix(vs):
    """Return the N x N matrix of pairwise inner products."""
    L = as_system(vs).vectors
    G = L @ L.T
    # BLAS may round the two triangles differently
    return 0.5 * (G + G.T)


def frame_operator(vs):
    vs = as_system(vs)
    L = vs.vectors
    A = L.T @ L
    A = 0.5 * (A + A.T)
    trace = _sum(vs.norms2)
    return FrameOperator(entries=A, trace=trace, tight_constant=trace / vs.dim)


def frame_potential(vs):
    """Sum of squared inner products over all ordered pairs, diagonal included."""
    G = gram_matrix(vs)
    return _sum(G * G)


def frame_eigenvalues(vs):
    """Ascending eigenvalues of the frame operator, small ones snapped to 0."""
    A = frame_operator(vs).entries
    w = np.linalg.eigvalsh(A)
    cutoff = RANK_TOL * max(float(w[-1]), 1.0)
    w = np.where(w < cutoff, 0.0, w)
    return w


def frame_rank(vs):
    return int(np.count_nonzero(frame_eigenvalues(vs)))


def frame_bounds(vs):
    """Optimal lower and upper frame bounds.

    These are the extreme eigenvalues of the frame operator. A lower
    bound of 0 means the system does not span R^d.
    """
    w = frame_eigenvalues(vs)
    return float(w[0]), float(w[-1])


def tightness_defect(vs):
    """Relative Frobenius distance of the frame operator from ``(tr A / d) I``.

    Zero exactly for tight frames.
    """
    fo = frame_operator(vs)
    lam = fo.tight_constant
    if not lam > 0.0:
        raise ValueError("tightness defect is undefined for an all-zero system")
    d = fo.entries.shape[0]
    return float(np.linalg.norm(fo.entries - lam * np.eye(d)) / lam)


def is_tight(vs, tol=TIGHT_TOL):
    return tightness_defect(vs) <= tol


def max_coherence2(vs):
    """Largest squared inner product between two distinct vectors (0 if N = 1)."""
    G = gram_matrix(vs)
    if G.shape[0] < 2:
        return 0.0
    off = G[~np.eye(G.shape[0], dtype=bool)]
    return float(np.max(off * off))
