"""Numerical maximization of the minimum ratio over the squared-norm shell.

Each restart runs three phases from a seeded random start:

1. projected gradient ascent on the smoothed minimum
   ``-(1/beta) log sum_k exp(-beta mu_k)`` over an increasing beta
   schedule, with radial clamping of squared norms to ``[c1, c2]``;
2. a trust-region sequential LP on the epigraph form
   ``max t s.t. mu_k(V) >= t`` to resolve the nonsmooth optimum;
3. discrete norm-reducing moves (single-vector shrinks and simultaneous
   scaling of the above-c1 block), each kept only if the minimum ratio
   does not drop.

The best system over restarts is returned.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from framelab import kernels
from framelab.bounds import (
    mu_upper_bound,
    nonminimal_count_bound,
    sigma0_extremal_value,
    uniform_case,
    welch_bound,
)
from framelab.frame_core import VectorSystem, as_system, max_coherence2, tightness_defect
from framelab.objective import (
    NormConstraints,
    RatioReport,
    block_derivative_term,
    evaluate,
)
from framelab.untf import SEED_MASK, make_rng, orthonormal_system, random_directions

#: Squared norms above ``c1 * (1 + NORM_RTOL)`` count as non-minimal.
NORM_RTOL = 1e-9


def default_beta_schedule():
    return tuple(float(b) for b in np.geomspace(10.0, 1e4, 8))


def thread_count(requested=None):
    """Worker count from ``requested`` or ``FRAME_LAB_THREADS`` (0 or unset = all cores)."""
    if requested is None:
        try:
            requested = int(os.environ.get("FRAME_LAB_THREADS", "0"))
        except ValueError:
            requested = 0
    if requested <= 0:
        requested = os.cpu_count() or 1
    return requested


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 16
    max_iters: int = 50000
    step_size: float = 1e-2
    softmin_beta_schedule: tuple = field(default_factory=default_beta_schedule)
    tolerance: float = 1e-10
    seed: int = 0
    enable_shrink_moves: bool = True
    enable_simultaneous_scaling_moves: bool = True
    enable_polish: bool = True
    polish_iters: int = 200
    patience: int = 50
    threads: Optional[int] = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")
        betas = tuple(float(b) for b in self.softmin_beta_schedule)
        if not betas or betas[0] <= 0 or any(b >= a for a, b in zip(betas[1:], betas)):
            raise ValueError("beta schedule must be non-empty, positive and strictly increasing")
        object.__setattr__(self, "softmin_beta_schedule", betas)
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass
class OptResult:
    best_system: VectorSystem
    best_report: RatioReport
    history: list
    restart_index: int
    converged: bool
    nonminimal_norm_count: int
    moves: list = field(default_factory=list)
    restart_values: list = field(default_factory=list)

    @property
    def min_value(self):
        return self.best_report.min_value


def nonminimal_count(vs, c1):
    return int(np.count_nonzero(as_system(vs).norms2 > c1 * (1 + NORM_RTOL)))


def smoothed_objective(V, sigma, beta):
    """Smoothed minimum of the ratios and its gradient with respect to V."""
    return kernels.softmin_value_grad(np.ascontiguousarray(V, dtype=np.float64), sigma, beta)


def ratio_jacobian(V, sigma):
    """Ratios ``mu`` (N,) and their Jacobian (N, N*d) with respect to the flattened V."""
    V = np.asarray(V, dtype=np.float64)
    N, d = V.shape
    G = V @ V.T
    num = np.diag(G).copy()
    G2 = G * G
    den = sigma * sigma + G2.sum(axis=1) - np.diag(G2)
    mu = num / den
    J = (-2.0 * (num / den**2))[:, None, None] * G[:, :, None] * V[:, None, :]
    interf = G @ V - num[:, None] * V
    k = np.arange(N)
    J[k, k] = (2.0 * V * den[:, None] - 2.0 * num[:, None] * interf) / (den**2)[:, None]
    return mu, J.reshape(N, N * d)


def _true_min(V, sigma):
    num, den = kernels.ratio_terms(V, sigma)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    return float(mu.min())


def polish(V, c1, c2, sigma, max_iters=200, radius=None):
    """Trust-region sequential LP on ``max min_k mu_k``.

    Each step solves the LP linearization of the ratios and of the
    squared-norm constraints inside an infinity-norm box; the step is
    kept only if the true minimum increases. Returns
    ``(V, min_value, accepted_values, converged)``.
    """
    V = np.array(V, dtype=np.float64, copy=True)
    N, d = V.shape
    n = N * d
    r = 1e-3 * math.sqrt(c1) if radius is None else radius
    r_max = 0.1 * math.sqrt(c1)
    r_min = 1e-14 * math.sqrt(c1)
    mu, J = ratio_jacobian(V, sigma)
    if not np.all(np.isfinite(mu)):
        return V, float(mu.min()), [], True
    current = float(mu.min())
    accepted = []
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    converged = False
    for _ in range(max_iters):
        B = np.zeros((N, n))
        for k in range(N):
            B[k, k * d:(k + 1) * d] = 2.0 * V[k]
        n2 = np.einsum("ij,ij->i", V, V)
        A_ub = np.vstack([
            np.hstack([-J, np.ones((N, 1))]),
            np.hstack([B, np.zeros((N, 1))]),
            np.hstack([-B, np.zeros((N, 1))]),
        ])
        b_ub = np.concatenate([mu, c2 - n2, n2 - c1])
        bounds = [(-r, r)] * n + [(None, None)]
        res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if res.status != 0:
            r *= 0.5
            if r < r_min:
                converged = True
                break
            continue
        trial = kernels.clamp_norms(np.ascontiguousarray(V + res.x[:n].reshape(N, d)), c1, c2)
        t_mu, t_J = ratio_jacobian(trial, sigma)
        t_min = float(t_mu.min())
        predicted = res.x[-1] - current
        actual = t_min - current
        if actual > 0 and np.all(np.isfinite(t_mu)):
            V, mu, J, current = trial, t_mu, t_J, t_min
            accepted.append(current)
            if actual > 0.5 * predicted:
                r = min(2.0 * r, r_max)
        else:
            r *= 0.25
        if r < r_min:
            converged = True
            break
    return V, current, accepted, converged


def _shrink_candidates(n2_k, c1):
    lam_full = math.sqrt(c1 / n2_k)
    yield lam_full
    for j in range(1, 5):
        target = c1 + (n2_k - c1) * (1.0 - 0.5**j)
        yield math.sqrt(target / n2_k)


def _set_norm_floor(V, idx, c1):
    # rounding in lam * v can land a hair below c1
    n2 = float(V[idx] @ V[idx])
    if n2 < c1:
        V[idx] *= math.sqrt(c1 / n2)


def discrete_moves(V, c1, sigma, shrink=True, simultaneous=True, max_sweeps=100):
    """Norm-reducing moves that never lower the minimum ratio.

    Shrinks at sigma = 0 are accepted without a numerical check since the
    minimum provably cannot drop; the recorded values may then wobble at
    rounding level. All other moves need a non-decreasing minimum.

    Returns ``(V, min_value, moves)`` where ``moves`` lists accepted moves
    as ``(kind, indices, lam, min_value)``.
    """
    V = np.array(V, dtype=np.float64, copy=True)
    current = _true_min(V, sigma)
    moves = []
    threshold = c1 * (1 + NORM_RTOL)
    for _ in range(max_sweeps):
        changed = False
        if shrink:
            for k in range(V.shape[0]):
                n2_k = float(V[k] @ V[k])
                if n2_k <= threshold:
                    continue
                for lam in _shrink_candidates(n2_k, c1):
                    trial = V.copy()
                    trial[k] *= lam
                    _set_norm_floor(trial, k, c1)
                    t_min = _true_min(trial, sigma)
                    # at sigma = 0 a shrink provably keeps the minimum; only rounding can say otherwise
                    if sigma == 0 or t_min >= current:
                        V, current = trial, t_min
                        moves.append(("shrink", (k,), lam, current))
                        changed = True
                        break
        if simultaneous:
            n2 = np.einsum("ij,ij->i", V, V)
            block = [int(i) for i in np.flatnonzero(n2 > threshold)]
            vs = VectorSystem(V)
            if block and all(block_derivative_term(vs, block, k, sigma) <= 0 for k in block):
                lam_min = max(math.sqrt(c1 / n2[i]) for i in block)
                for j in range(12):
                    lam = 1.0 - (1.0 - lam_min) * 0.5**j
                    trial = V.copy()
                    trial[block] *= lam
                    for i in block:
                        _set_norm_floor(trial, i, c1)
                    t_min = _true_min(trial, sigma)
                    if t_min >= current:
                        V, current = trial, t_min
                        moves.append(("simultaneous", tuple(block), lam, current))
                        changed = True
                        break
        if not changed:
            break
    return V, current, moves


@dataclass
class _RestartOutcome:
    V: np.ndarray
    min_value: float
    history: list
    moves: list
    converged: bool


def _initial_point(d, N, constraints, seed):
    rng = make_rng(seed)
    u = random_directions(rng, N, d)
    n2 = rng.uniform(constraints.c1, constraints.c2, size=N)
    return np.ascontiguousarray(u * np.sqrt(n2)[:, None]), rng


def _run_restart(d, N, constraints, config, restart):
    c1, c2, sigma = constraints.c1, constraints.c2, constraints.sigma
    seed = (config.seed + restart) & SEED_MASK
    V, rng = _initial_point(d, N, constraints, seed)
    betas = config.softmin_beta_schedule
    _, grad = smoothed_objective(V, sigma, betas[0])
    if not np.any(grad):
        jitter = random_directions(rng, N, d) * (1e-8 * math.sqrt(c1))
        V = kernels.clamp_norms(np.ascontiguousarray(V + jitter), c1, c2)
    stage_iters = max(1, config.max_iters // len(betas))
    step = config.step_size * c1 * c1
    history = []
    total = 0
    converged = False
    for beta in betas:
        V, it, _, step = kernels.ascend(
            V, c1, c2, sigma, beta, step, stage_iters, config.tolerance, config.patience
        )
        # the adaptive step is tuned to the previous beta; restart it moderately
        step = max(step, config.step_size * c1 * c1 * 1e-3)
        total += it
        history.append((total, _true_min(V, sigma)))
        converged = it < stage_iters
    if config.enable_polish:
        V, _, accepted, pconv = polish(V, c1, c2, sigma, config.polish_iters)
        for val in accepted:
            total += 1
            history.append((total, val))
        converged = converged or pconv
    V, current, moves = discrete_moves(
        V,
        c1,
        sigma,
        shrink=config.enable_shrink_moves,
        simultaneous=config.enable_simultaneous_scaling_moves,
    )
    for move in moves:
        total += 1
        history.append((total, move[3]))
    return _RestartOutcome(V=V, min_value=current, history=history, moves=moves, converged=converged)


def _orthogonal_optimum(d, N, constraints):
    # N <= d: orthogonal systems make every interference term vanish;
    # at sigma > 0 the ratio c/sigma^2 grows with c, so take c2
    c = constraints.c1 if constraints.sigma == 0 else constraints.c2
    vs = orthonormal_system(d, N, np.full(N, c))
    report = evaluate(vs, constraints.sigma)
    return OptResult(
        best_system=vs,
        best_report=report,
        history=[(0, report.min_value)],
        restart_index=0,
        converged=True,
        nonminimal_norm_count=nonminimal_count(vs, constraints.c1),
        restart_values=[report.min_value],
    )


def optimize(d, N, constraints, config=None):
    """Maximize ``min_k mu_k`` over N vectors in R^d with ``c1 <= |v|^2 <= c2``.

    For ``N <= d`` the optimum is an orthogonal system and is returned
    directly. Otherwise ``config.restarts`` seeded restarts run (on up to
    ``thread_count(config.threads)`` threads) and the best is kept, ties
    going to the lowest restart index.
    """
    if d < 1 or N < 1:
        raise ValueError(f"need d >= 1 and N >= 1, got d={d}, N={N}")
    if not isinstance(constraints, NormConstraints):
        raise TypeError("constraints must be a NormConstraints")
    config = OptimizerConfig() if config is None else config
    if N <= d:
        return _orthogonal_optimum(d, N, constraints)

    def task(r):
        return _run_restart(d, N, constraints, config, r)

    workers = min(thread_count(config.threads), config.restarts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(task, range(config.restarts)))
    else:
        outcomes = [task(r) for r in range(config.restarts)]

    best_index = 0
    for i, out in enumerate(outcomes):
        if out.min_value > outcomes[best_index].min_value:
            best_index = i
    best = outcomes[best_index]
    vs = VectorSystem(best.V)
    return OptResult(
        best_system=vs,
        best_report=evaluate(vs, constraints.sigma),
        history=best.history,
        restart_index=best_index,
        converged=best.converged,
        nonminimal_norm_count=nonminimal_count(vs, constraints.c1),
        moves=best.moves,
        restart_values=[o.min_value for o in outcomes],
    )


@dataclass(frozen=True)
class CertReport:
    d: int
    N: int
    c1: float
    c2: float
    sigma: float
    achieved: float
    objective: float
    sigma0_target: float
    sigma0_gap: Optional[float]
    sigma0_maximality_ok: Optional[bool]
    uniform_value: Optional[float]
    uniform_gap: Optional[float]
    nonminimal_norm_count: int
    count_bound: float
    count_bound_valid: bool
    count_within_bound: Optional[bool]
    welch_value_nonminimal: Optional[float]
    max_coherence2_nonminimal: Optional[float]
    welch_condition_violated: Optional[bool]
    mu_upper: Optional[float]
    mu_condition_holds: bool
    within_mu_bound: Optional[bool]
    tightness_defect: float
    projected_tightness_defect: float


def project_to_c1(vs, c1):
    """Rescale every vector to squared norm c1."""
    vs = as_system(vs)
    return VectorSystem(vs.vectors * np.sqrt(c1 / vs.norms2)[:, None])


def certify(vs, constraints):
    """Compare a feasible system against every applicable closed form.

    ``sigma0_gap`` is ``d/(c1(N-d)) - achieved`` at sigma = 0 (None
    otherwise). The Welch check looks at the vectors with |v|^2 > c1: an
    optimal system of least total squared norm needs all their squared
    cross inner products below sigma^2, which the Welch bound can rule
    out; ``welch_condition_violated`` flags a system that fails it.
    """
    vs = as_system(vs)
    if not constraints.feasible(vs):
        raise ValueError("system violates the squared-norm constraints")
    d, N = vs.dim, vs.count
    c1, c2, sigma = constraints.c1, constraints.c2, constraints.sigma
    report = evaluate(vs, sigma)
    achieved = report.min_value
    target = sigma0_extremal_value(d, N, c1)
    if sigma == 0:
        gap = 0.0 if math.isinf(target) and math.isinf(achieved) else target - achieved
        maximal_ok = achieved <= target * (1 + 1e-7)
    else:
        gap, maximal_ok = None, None
    if N > d:
        uni = uniform_case(d, N, c1, c2, sigma)
        uniform_value, uniform_gap = uni.ratio, achieved - uni.ratio
    else:
        uniform_value = uniform_gap = None
    count = nonminimal_count(vs, c1)
    cnt = nonminimal_count_bound(d, c1, sigma)
    above = vs.norms2 > c1 * (1 + NORM_RTOL)
    if count >= 2:
        sub = VectorSystem(vs.vectors[above])
        coh = max_coherence2(sub)
        welch = welch_bound(count, d, c1)
        violated = not sigma * sigma > coh
    else:
        coh = welch = violated = None
    mu_upper, mu_cond, within = None, False, None
    if N > d and cnt.valid:
        mu = mu_upper_bound(d, N, c1, c2, sigma)
        mu_upper, mu_cond = mu.mu_bound, mu.condition_holds
        if mu_cond:
            within = achieved <= mu_upper + 1e-9
    return CertReport(
        d=d,
        N=N,
        c1=c1,
        c2=c2,
        sigma=sigma,
        achieved=achieved,
        objective=report.objective,
        sigma0_target=target,
        sigma0_gap=gap,
        sigma0_maximality_ok=maximal_ok,
        uniform_value=uniform_value,
        uniform_gap=uniform_gap,
        nonminimal_norm_count=count,
        count_bound=cnt.bound,
        count_bound_valid=cnt.valid,
        count_within_bound=(count < cnt.bound) if cnt.valid else None,
        welch_value_nonminimal=welch,
        max_coherence2_nonminimal=coh,
        welch_condition_violated=violated,
        mu_upper=mu_upper,
        mu_condition_holds=mu_cond,
        within_mu_bound=within,
        tightness_defect=tightness_defect(vs),
        projected_tightness_defect=tightness_defect(project_to_c1(vs, c1)),
    )
