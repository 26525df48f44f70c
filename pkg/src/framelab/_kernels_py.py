"""Pure numpy implementations of the iterative kernels.

Mirrors ``_kernels.pyx`` function for function; used when the compiled
extension is unavailable or ``FRAMELAB_PURE_PYTHON`` is set.
"""

import math

import numpy as np


def ratio_terms(V, sigma):
    """Return ``(numerators, denominators)`` of the per-vector ratios.

    numerators[k] = |v_k|^2, denominators[k] = sigma^2 + sum_{l != k} <v_k, v_l>^2.
    """
    G = V @ V.T
    num = np.diag(G).copy()
    G2 = G * G
    den = sigma * sigma + (G2.sum(axis=1) - np.diag(G2))
    return num, den


def _ratios(num, den):
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), np.inf)
    return mu


def softmin_value(V, sigma, beta):
    num, den = ratio_terms(V, sigma)
    mu = _ratios(num, den)
    finite = np.isfinite(mu)
    if not finite.any():
        return math.inf
    m = mu[finite].min()
    z = np.exp(-beta * (mu[finite] - m))
    return float(m - math.log(z.sum()) / beta)


def softmin_value_grad(V, sigma, beta):
    """Smoothed minimum ``-(1/beta) log sum_k exp(-beta mu_k)`` and its gradient in V."""
    V = np.asarray(V, dtype=np.float64)
    G = V @ V.T
    num = np.diag(G).copy()
    G2 = G * G
    den = sigma * sigma + (G2.sum(axis=1) - np.diag(G2))
    mu = _ratios(num, den)
    finite = np.isfinite(mu)
    if not finite.any():
        return math.inf, np.zeros_like(V)
    m = mu[finite].min()
    z = np.zeros_like(mu)
    z[finite] = np.exp(-beta * (mu[finite] - m))
    total = z.sum()
    value = float(m - math.log(total) / beta)
    w = z / total
    safe_den = np.where(finite, den, 1.0)
    a = np.where(finite, w / safe_den, 0.0)
    b = np.where(finite, w * num / (safe_den * safe_den), 0.0)
    C = (b[:, None] + b[None, :]) * G
    np.fill_diagonal(C, 0.0)
    grad = 2.0 * a[:, None] * V - 2.0 * (C @ V)
    return value, grad


def clamp_norms(V, c1, c2):
    """Radially project each row onto the shell c1 <= |v|^2 <= c2 (in place)."""
    n2 = np.einsum("ij,ij->i", V, V)
    scale = np.ones_like(n2)
    lo = (n2 < c1) & (n2 > 0.0)
    hi = n2 > c2
    scale[lo] = np.sqrt(c1 / n2[lo])
    scale[hi] = np.sqrt(c2 / n2[hi])
    V *= scale[:, None]
    return V


def ascend(V, c1, c2, sigma, beta, step, max_iters, tol, patience):
    """Projected gradient ascent on the smoothed minimum with an adaptive step.

    A trial step is kept only if the smoothed value does not drop; the
    step grows by 1.2 on success and halves on failure. Stops after
    ``patience`` consecutive accepted steps with relative gain below
    ``tol``, when the step underflows, or after ``max_iters`` trials.

    Returns ``(V, iterations, value, step)``.
    """
    V = clamp_norms(np.array(V, dtype=np.float64, copy=True), c1, c2)
    value, grad = softmin_value_grad(V, sigma, beta)
    stall = 0
    it = 0
    while it < max_iters:
        it += 1
        if not math.isfinite(value):
            break
        trial = clamp_norms(V + step * grad, c1, c2)
        tval, tgrad = softmin_value_grad(trial, sigma, beta)
        if tval >= value:
            gain = (tval - value) / max(abs(value), 1e-300)
            V, value, grad = trial, tval, tgrad
            step *= 1.2
            if gain < tol:
                stall += 1
                if stall >= patience:
                    break
            else:
                stall = 0
        else:
            step *= 0.5
            if step < 1e-300:
                break
    return V, it, value, step


def tight_defect(V, c):
    """Defect ||A - (N c / d) I||_F / (N c / d) for a system of squared norm c."""
    N, d = V.shape
    lam = N * c / d
    A = V.T @ V
    return float(np.linalg.norm(A - lam * np.eye(d)) / lam)


def fp_descent(V, c, step, max_iters, tol, check_every):
    """Frame-potential descent on the product of spheres of squared radius c.

    Each step moves every vector against the tangential part of
    ``4 sum_l <v_k, v_l> v_l`` and renormalizes it to squared norm c.

    Returns ``(V, iterations, defect)``.
    """
    V = np.array(V, dtype=np.float64, copy=True)
    n2 = np.einsum("ij,ij->i", V, V)
    V *= np.sqrt(c / n2)[:, None]
    defect = tight_defect(V, c)
    it = 0
    while it < max_iters and defect > tol:
        for _ in range(check_every):
            g = 4.0 * ((V @ V.T) @ V)
            radial = np.einsum("ij,ij->i", g, V) / c
            g -= radial[:, None] * V
            V -= step * g
            n2 = np.einsum("ij,ij->i", V, V)
            V *= np.sqrt(c / n2)[:, None]
            it += 1
            if it >= max_iters:
                break
        defect = tight_defect(V, c)
    return V, it, defect
