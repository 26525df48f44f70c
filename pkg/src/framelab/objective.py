"""The max-min ratio objective and the norm-scaling transformations.

For a system ``v_1..v_N`` and noise level ``sigma`` the per-vector ratio is

    mu_k = |v_k|^2 / (sigma^2 + sum_{l != k} <v_k, v_l>^2)

and the objective is ``N * log(1 + min_k mu_k)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from framelab.frame_core import _sum, as_system, gram_matrix, VectorSystem

#: Indices within this relative distance of the minimum ratio are "minimal".
ARGMIN_RTOL = 1e-9


class IndeterminateRatioError(ValueError):
    """Raised for a zero vector whose ratio is 0/0 (sigma = 0, no interference)."""


@dataclass(frozen=True)
class NormConstraints:
    """Squared-norm shell ``c1 <= |v|^2 <= c2`` and noise level ``sigma``."""

    c1: float
    c2: float
    sigma: float = 0.0

    def __post_init__(self):
        for name in ("c1", "c2", "sigma"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not 0.0 < self.c1 < self.c2:
            raise ValueError(f"need 0 < c1 < c2, got c1={self.c1}, c2={self.c2}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")

    def feasible(self, vs, rtol=1e-9):
        n2 = as_system(vs).norms2
        return bool(np.all(n2 >= self.c1 * (1 - rtol)) and np.all(n2 <= self.c2 * (1 + rtol)))


@dataclass(frozen=True)
class RatioReport:
    ratios: tuple
    row_energies: tuple
    min_value: float
    argmin_set: frozenset
    objective: float
    sigma: float = 0.0

    @property
    def is_infinite(self):
        return math.isinf(self.min_value)


def _check_index(vs, k):
    if not 0 <= k < vs.count:
        raise IndexError(f"vector index {k} out of range for N={vs.count}")


def _row_terms(G, k):
    row = G[k]
    energy = _sum(row * row)
    interference = energy - row[k] * row[k]
    return energy, interference


def _ratio(num, den, k):
    if den > 0.0:
        return num / den
    if num > 0.0:
        return math.inf
    raise IndeterminateRatioError(f"ratio of vector {k} is 0/0")


def row_energy(vs, k):
    """``sum_l <v_k, v_l>^2`` over all l, including l = k (0-based k)."""
    vs = as_system(vs)
    _check_index(vs, k)
    v = vs.vectors
    row = v @ v[k]
    return _sum(row * row)


def per_vector_ratio(vs, sigma, k):
    """Ratio of vector k (0-based); ``inf`` when its denominator vanishes."""
    vs = as_system(vs)
    _check_index(vs, k)
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    v = vs.vectors
    row = v @ v[k]
    num = float(row[k])
    interference = _sum(np.delete(row, k) ** 2)
    return _ratio(num, sigma * sigma + interference, k)


def evaluate(vs, sigma=0.0):
    """Evaluate all ratios, their minimum and the log objective."""
    vs = as_system(vs)
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    G = gram_matrix(vs)
    ratios, energies = [], []
    for k in range(vs.count):
        energy, interference = _row_terms(G, k)
        energies.append(energy)
        ratios.append(_ratio(float(G[k, k]), sigma * sigma + interference, k))
    m = min(ratios)
    if math.isinf(m):
        argmin = frozenset(range(vs.count))
        objective = math.inf
    else:
        cutoff = m * (1.0 + ARGMIN_RTOL)
        argmin = frozenset(k for k, r in enumerate(ratios) if r <= cutoff)
        objective = vs.count * math.log1p(m)
    return RatioReport(
        ratios=tuple(ratios),
        row_energies=tuple(energies),
        min_value=m,
        argmin_set=argmin,
        objective=objective,
        sigma=float(sigma),
    )


def min_ratio(vs, sigma=0.0):
    return evaluate(vs, sigma).min_value


def _check_lambda(lam):
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"scaling factor must lie in (0, 1], got {lam}")


def shrink_vector(vs, k, lam):
    """Copy of ``vs`` with vector k multiplied by ``lam`` in (0, 1].

    At sigma = 0 this never lowers any ratio: vector k keeps its own
    ratio and every other interference term shrinks by ``lam**2``.
    """
    vs = as_system(vs)
    _check_index(vs, k)
    _check_lambda(lam)
    out = vs.vectors.copy()
    out[k] *= lam
    return VectorSystem(out)


def scale_block(vs, indices, lam):
    """Multiply the vectors at ``indices`` by ``lam`` in (0, 1]."""
    vs = as_system(vs)
    _check_lambda(lam)
    out = vs.vectors.copy()
    idx = np.asarray(sorted(indices), dtype=int)
    if idx.size:
        out[idx] *= lam
    return VectorSystem(out)


def simultaneous_scaling(vs, m, lam):
    """Scale every vector with 0-based index >= m by ``lam``; keep the first m."""
    vs = as_system(vs)
    if not 0 <= m <= vs.count:
        raise IndexError(f"block start {m} out of range for N={vs.count}")
    return scale_block(vs, range(m, vs.count), lam)


def block_derivative_term(vs, block, k, sigma):
    """``sigma^2 - sum_{l in block, l != k} <v_k, v_l>^2``.

    Its sign is the sign of d mu_k / d lambda at lambda = 1 when the
    vectors in ``block`` (which must contain k) are scaled together.
    """
    vs = as_system(vs)
    block = sorted(set(block))
    if k not in block:
        raise ValueError(f"vector {k} is not in the scaled block")
    v = vs.vectors
    others = [l for l in block if l != k]
    if not others:
        return sigma * sigma
    ip = v[others] @ v[k]
    return sigma * sigma - _sum(ip * ip)


def scaling_derivative_sign(vs, m, k, sigma):
    """Sign (-1, 0, +1) of d mu_k / d lambda at lambda = 1 under ``simultaneous_scaling(vs, m, .)``.

    ``k`` must be in the scaled block, i.e. ``k >= m`` (0-based).
    """
    vs = as_system(vs)
    if not m <= k < vs.count:
        raise ValueError(f"vector {k} is not in the scaled block starting at {m}")
    t = block_derivative_term(vs, range(m, vs.count), k, sigma)
    return int(np.sign(t))


def scaled_ratio(vs, m, k, sigma, lam):
    """Ratio of vector k after ``simultaneous_scaling(vs, m, lam)``, for any lam > 0."""
    vs = as_system(vs)
    v = vs.vectors.copy()
    v[m:] *= lam
    return per_vector_ratio(VectorSystem(v), sigma, k)
