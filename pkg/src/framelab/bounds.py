"""Closed-form values and bounds for the max-min ratio problem.

Every function takes the problem parameters directly (dimension ``d``,
count ``N``, squared-norm bounds ``c1 < c2``, noise level ``sigma``) and
reports validity conditions as flags instead of producing NaN.
"""

import math
from dataclasses import dataclass, asdict
from typing import NamedTuple, Optional


def _check_dims(d, N):
    if d < 1 or N < 1:
        raise ValueError(f"need d >= 1 and N >= 1, got d={d}, N={N}")


def sigma0_extremal_value(d, N, c1):
    """Optimal min-ratio at sigma = 0: ``d / (c1 (N - d))``, or ``inf`` if N <= d."""
    _check_dims(d, N)
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    if N <= d:
        return math.inf
    return d / (c1 * (N - d))


def sigma0_answer(d, N, c1):
    """``N log(1 + d / (c1 (N - d)))``, the sigma = 0 optimum of the log objective."""
    return N * math.log1p(sigma0_extremal_value(d, N, c1))


def uniform_cost(c, d, N, sigma):
    """``sigma^2 / c + c (N - d) / d``: reciprocal min-ratio of a tight frame with |v|^2 = c."""
    return sigma * sigma / c + c * (N - d) / d


class UniformCase(NamedTuple):
    argmin_c: float
    ratio: float
    answer: float
    condition_holds: bool


def uniform_case(d, N, c1, c2, sigma):
    """Best common squared norm for a scaled tight frame, and the resulting values.

    The cost ``uniform_cost`` is convex in c with unconstrained minimizer
    ``sigma * sqrt(d / (N - d))``; the constrained minimizer is that point
    clamped to ``[c1, c2]``. ``condition_holds`` reports
    ``sigma <= c1 sqrt((N - d) / d)``, under which the minimizer is c1.
    """
    _check_dims(d, N)
    if N <= d:
        raise ValueError(f"uniform case needs N > d, got N={N}, d={d}")
    if not 0 < c1 < c2:
        raise ValueError(f"need 0 < c1 < c2, got c1={c1}, c2={c2}")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    c_star = sigma * math.sqrt(d / (N - d))
    c = min(max(c_star, c1), c2)
    ratio = 1.0 / uniform_cost(c, d, N, sigma)
    return UniformCase(
        argmin_c=c,
        ratio=ratio,
        answer=N * math.log1p(ratio),
        condition_holds=sigma <= c1 * math.sqrt((N - d) / d),
    )


def welch_bound(M, d, c1):
    """Lower bound ``c1^2 (M - d) / (d (M - 1))`` on the largest squared cross inner product.

    Holds for any M vectors in R^d with squared norms at least c1. Taken
    as 0 for a single vector.
    """
    if M < 1 or d < 1:
        raise ValueError(f"need M >= 1 and d >= 1, got M={M}, d={d}")
    if M == 1:
        return 0.0
    return c1 * c1 * (M - d) / (d * (M - 1))


def strict_integer_below(x):
    """Largest integer strictly less than ``x``."""
    f = math.floor(x)
    return int(f) - 1 if f == x else int(f)


class CountBound(NamedTuple):
    bound: float
    valid: bool
    max_integer_count: Optional[int]


def nonminimal_count_bound(d, c1, sigma):
    """Bound ``d (c1^2 - sigma^2) / (c1^2 - d sigma^2)`` on vectors with |v|^2 > c1.

    Some optimal system has strictly fewer than ``bound`` such vectors;
    the bound is only meaningful when ``c1^2 > d sigma^2``.
    """
    if d < 1 or c1 <= 0 or sigma < 0:
        raise ValueError("need d >= 1, c1 > 0, sigma >= 0")
    s2 = sigma * sigma
    denom = c1 * c1 - d * s2
    if denom <= 0:
        return CountBound(bound=math.inf, valid=False, max_integer_count=None)
    bound = d * (c1 * c1 - s2) / denom
    return CountBound(bound=bound, valid=True, max_integer_count=strict_integer_below(bound))


class MuUpperBound(NamedTuple):
    mu_bound: Optional[float]
    condition_holds: bool
    R_interval: tuple


def _count_factor(d, c1, sigma):
    s2 = sigma * sigma
    return (c1 * c1 - s2) / (c1 * c1 - d * s2)


def r_quotient(R, d, N, c1, c2, sigma):
    """Upper bound on the min-ratio of an optimal system with total squared norm R.

    ``R / (N sigma^2 + R^2/d - N c1^2 - d (c2^2 - c1^2) K)`` with
    ``K = (c1^2 - sigma^2) / (c1^2 - d sigma^2)``. Returns ``inf`` where
    the denominator is not positive (no bound).
    """
    K = _count_factor(d, c1, sigma)
    den = N * sigma * sigma + R * R / d - N * c1 * c1 - d * (c2 * c2 - c1 * c1) * K
    if den <= 0:
        return math.inf
    return R / den


def mu_upper_bound(d, N, c1, c2, sigma):
    """Upper bound on the optimal min-ratio for small sigma.

    When ``N^2 c1^2 > N d (c1^2 - sigma^2) + d^2 (c2^2 - c1^2) K`` the
    bound is ``c1 / (sigma^2 + c1^2 (N - d)/d - d^2 (c2^2 - c1^2) K)``.
    Otherwise the R-quotient has a pole at or inside the admissible
    R range, no finite bound follows and ``mu_bound`` is None.
    """
    _check_dims(d, N)
    if N <= d:
        raise ValueError(f"need N > d, got N={N}, d={d}")
    if not 0 < c1 < c2:
        raise ValueError(f"need 0 < c1 < c2, got c1={c1}, c2={c2}")
    s2 = sigma * sigma
    if c1 * c1 <= d * s2:
        raise ValueError("mu bound requires c1^2 > d sigma^2")
    K = _count_factor(d, c1, sigma)
    gap = (c2 * c2 - c1 * c1) * K
    R_interval = (N * c1, N * c1 + d * K * (c2 - c1))
    condition = N * N * c1 * c1 > N * d * (c1 * c1 - s2) + d * d * gap
    if not condition:
        return MuUpperBound(None, False, R_interval)
    den = s2 + c1 * c1 * (N - d) / d - d * d * gap
    mu = c1 / den if den > 0 else math.inf
    return MuUpperBound(mu, True, R_interval)


@dataclass(frozen=True)
class BoundsReport:
    d: int
    N: int
    c1: float
    c2: float
    sigma: float
    sigma0_value: float
    sigma0_answer: float
    uniform_argmin_c: Optional[float]
    uniform_value: Optional[float]
    uniform_answer: Optional[float]
    uniform_condition_holds: Optional[bool]
    welch_value: float
    count_bound: float
    count_bound_valid: bool
    max_nonminimal_count: Optional[int]
    R_interval: Optional[tuple]
    mu_condition_holds: bool
    mu_upper: Optional[float]

    def as_dict(self):
        return asdict(self)


def bounds_report(d, N, c1, c2, sigma):
    """Collect every closed-form quantity for one parameter set.

    ``welch_value`` is the Welch bound for the whole system (M = N).
    Quantities whose preconditions fail are reported as None.
    """
    _check_dims(d, N)
    if not 0 < c1 < c2:
        raise ValueError(f"need 0 < c1 < c2, got c1={c1}, c2={c2}")
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    s0 = sigma0_extremal_value(d, N, c1)
    uni = uniform_case(d, N, c1, c2, sigma) if N > d else None
    cnt = nonminimal_count_bound(d, c1, sigma)
    if N > d and cnt.valid:
        mu = mu_upper_bound(d, N, c1, c2, sigma)
    else:
        mu = None
    return BoundsReport(
        d=d,
        N=N,
        c1=c1,
        c2=c2,
        sigma=sigma,
        sigma0_value=s0,
        sigma0_answer=N * math.log1p(s0),
        uniform_argmin_c=uni.argmin_c if uni else None,
        uniform_value=uni.ratio if uni else None,
        uniform_answer=uni.answer if uni else None,
        uniform_condition_holds=uni.condition_holds if uni else None,
        welch_value=welch_bound(N, d, c1),
        count_bound=cnt.bound,
        count_bound_valid=cnt.valid,
        max_nonminimal_count=cnt.max_integer_count,
        R_interval=mu.R_interval if mu else None,
        mu_condition_holds=bool(mu and mu.condition_holds),
        mu_upper=mu.mu_bound if mu else None,
    )
