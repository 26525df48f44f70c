# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the iterative kernels in ``_kernels_py``.

Signatures and return values match the numpy fallback. The inner loops
release the GIL so optimizer restarts can run on separate threads.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, log, fabs, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef void _gram(const double[:, ::1] V, double* G, Py_ssize_t N, Py_ssize_t d) noexcept nogil:
    cdef Py_ssize_t i, j, a
    cdef double s
    for i in range(N):
        for j in range(i, N):
            s = 0.0
            for a in range(d):
                s += V[i, a] * V[j, a]
            G[i * N + j] = s
            G[j * N + i] = s


cdef void _terms(const double* G, Py_ssize_t N, double sigma,
                 double* num, double* den) noexcept nogil:
    cdef Py_ssize_t k, l
    cdef double s, g
    for k in range(N):
        num[k] = G[k * N + k]
        s = 0.0
        for l in range(N):
            if l != k:
                g = G[k * N + l]
                s += g * g
        den[k] = sigma * sigma + s


cdef double _softmin(const double[:, ::1] V, Py_ssize_t N, Py_ssize_t d, double sigma,
                     double beta, double[:, ::1] grad, bint want_grad,
                     double* G, double* num, double* den, double* w) noexcept nogil:
    """Smoothed minimum of the ratios; fills ``grad`` when requested."""
    cdef Py_ssize_t k, l, a
    cdef double m = INFINITY, total = 0.0, value, mu, bk, c
    cdef bint any_finite = False
    _gram(V, G, N, d)
    _terms(G, N, sigma, num, den)
    for k in range(N):
        if den[k] > 0.0:
            mu = num[k] / den[k]
            any_finite = True
            if mu < m:
                m = mu
    if not any_finite:
        if want_grad:
            for k in range(N):
                for a in range(d):
                    grad[k, a] = 0.0
        return INFINITY
    for k in range(N):
        if den[k] > 0.0:
            w[k] = exp(-beta * (num[k] / den[k] - m))
            total += w[k]
        else:
            w[k] = 0.0
    value = m - log(total) / beta
    if not want_grad:
        return value
    # reuse num/den storage: a_k -> num, b_k -> den
    for k in range(N):
        w[k] /= total
        if den[k] > 0.0:
            bk = w[k] * num[k] / (den[k] * den[k])
            num[k] = w[k] / den[k]
            den[k] = bk
        else:
            num[k] = 0.0
            den[k] = 0.0
    for k in range(N):
        for a in range(d):
            grad[k, a] = 2.0 * num[k] * V[k, a]
        for l in range(N):
            if l != k:
                c = 2.0 * (den[k] + den[l]) * G[k * N + l]
                for a in range(d):
                    grad[k, a] -= c * V[l, a]
    return value


cdef void _clamp(double[:, ::1] V, Py_ssize_t N, Py_ssize_t d, double c1, double c2) noexcept nogil:
    cdef Py_ssize_t k, a
    cdef double n2, s
    for k in range(N):
        n2 = 0.0
        for a in range(d):
            n2 += V[k, a] * V[k, a]
        if n2 < c1 and n2 > 0.0:
            s = sqrt(c1 / n2)
        elif n2 > c2:
            s = sqrt(c2 / n2)
        else:
            continue
        for a in range(d):
            V[k, a] *= s


def ratio_terms(V, double sigma):
    cdef double[:, ::1] Vm = np.ascontiguousarray(V, dtype=np.float64)
    cdef Py_ssize_t N = Vm.shape[0], d = Vm.shape[1]
    G = np.empty((N, N))
    num = np.empty(N)
    den = np.empty(N)
    cdef double[:, ::1] Gm = G
    cdef double[::1] nm = num, dm = den
    with nogil:
        _gram(Vm, &Gm[0, 0], N, d)
        _terms(&Gm[0, 0], N, sigma, &nm[0], &dm[0])
    return num, den


def softmin_value(V, double sigma, double beta):
    cdef double[:, ::1] Vm = np.ascontiguousarray(V, dtype=np.float64)
    cdef Py_ssize_t N = Vm.shape[0], d = Vm.shape[1]
    cdef double[:, ::1] dummy = np.empty((1, 1))
    cdef double* buf = <double*> malloc((N * N + 3 * N) * sizeof(double))
    cdef double value
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            value = _softmin(Vm, N, d, sigma, beta, dummy, False,
                             buf, buf + N * N, buf + N * N + N, buf + N * N + 2 * N)
    finally:
        free(buf)
    return value


def softmin_value_grad(V, double sigma, double beta):
    cdef double[:, ::1] Vm = np.ascontiguousarray(V, dtype=np.float64)
    cdef Py_ssize_t N = Vm.shape[0], d = Vm.shape[1]
    grad = np.empty((N, d))
    cdef double[:, ::1] gm = grad
    cdef double* buf = <double*> malloc((N * N + 3 * N) * sizeof(double))
    cdef double value
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            value = _softmin(Vm, N, d, sigma, beta, gm, True,
                             buf, buf + N * N, buf + N * N + N, buf + N * N + 2 * N)
    finally:
        free(buf)
    return value, grad


def clamp_norms(V, double c1, double c2):
    cdef double[:, ::1] Vm = V
    with nogil:
        _clamp(Vm, Vm.shape[0], Vm.shape[1], c1, c2)
    return V


def ascend(V, double c1, double c2, double sigma, double beta, double step,
           long max_iters, double tol, long patience):
    out = np.array(V, dtype=np.float64, copy=True, order="C")
    cdef Py_ssize_t N = out.shape[0], d = out.shape[1]
    trial = np.empty_like(out)
    grad = np.empty_like(out)
    tgrad = np.empty_like(out)
    cdef double[:, ::1] Vm = out, Tm = trial, gm = grad, tgm = tgrad, swap
    cdef double* buf = <double*> malloc((N * N + 3 * N) * sizeof(double))
    cdef double value, tval, gain
    cdef long it = 0, stall = 0
    cdef Py_ssize_t k, a
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            _clamp(Vm, N, d, c1, c2)
            value = _softmin(Vm, N, d, sigma, beta, gm, True,
                             buf, buf + N * N, buf + N * N + N, buf + N * N + 2 * N)
            while it < max_iters:
                it += 1
                if value == INFINITY or value != value:
                    break
                for k in range(N):
                    for a in range(d):
                        Tm[k, a] = Vm[k, a] + step * gm[k, a]
                _clamp(Tm, N, d, c1, c2)
                tval = _softmin(Tm, N, d, sigma, beta, tgm, True,
                                buf, buf + N * N, buf + N * N + N, buf + N * N + 2 * N)
                if tval >= value:
                    gain = (tval - value) / (fabs(value) if fabs(value) > 1e-300 else 1e-300)
                    swap = Vm; Vm = Tm; Tm = swap
                    swap = gm; gm = tgm; tgm = swap
                    value = tval
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
    finally:
        free(buf)
    return np.asarray(Vm).copy(), it, value, step


cdef double _defect(const double[:, ::1] V, Py_ssize_t N, Py_ssize_t d, double c, double* A) noexcept nogil:
    cdef Py_ssize_t i, a, b
    cdef double lam = N * c / d, s, e, acc = 0.0
    for a in range(d):
        for b in range(a, d):
            s = 0.0
            for i in range(N):
                s += V[i, a] * V[i, b]
            e = s - (lam if a == b else 0.0)
            acc += e * e if a == b else 2.0 * e * e
    return sqrt(acc) / lam


def tight_defect(V, double c):
    cdef double[:, ::1] Vm = np.ascontiguousarray(V, dtype=np.float64)
    cdef double value
    with nogil:
        value = _defect(Vm, Vm.shape[0], Vm.shape[1], c, NULL)
    return value


def fp_descent(V, double c, double step, long max_iters, double tol, long check_every):
    out = np.array(V, dtype=np.float64, copy=True, order="C")
    cdef double[:, ::1] Vm = out
    cdef Py_ssize_t N = Vm.shape[0], d = Vm.shape[1]
    cdef Py_ssize_t i, j, a
    cdef long it = 0, inner
    cdef double defect, n2, s, radial
    cdef double* G = <double*> malloc((N * N + N * d) * sizeof(double))
    cdef double* g
    if G == NULL:
        raise MemoryError()
    g = G + N * N
    try:
        with nogil:
            for i in range(N):
                n2 = 0.0
                for a in range(d):
                    n2 += Vm[i, a] * Vm[i, a]
                s = sqrt(c / n2)
                for a in range(d):
                    Vm[i, a] *= s
            defect = _defect(Vm, N, d, c, NULL)
            while it < max_iters and defect > tol:
                inner = 0
                while inner < check_every and it < max_iters:
                    _gram(Vm, G, N, d)
                    for i in range(N):
                        radial = 0.0
                        for a in range(d):
                            s = 0.0
                            for j in range(N):
                                s += G[i * N + j] * Vm[j, a]
                            g[i * d + a] = 4.0 * s
                            radial += g[i * d + a] * Vm[i, a]
                        radial /= c
                        for a in range(d):
                            g[i * d + a] -= radial * Vm[i, a]
                    for i in range(N):
                        n2 = 0.0
                        for a in range(d):
                            Vm[i, a] -= step * g[i * d + a]
                            n2 += Vm[i, a] * Vm[i, a]
                        s = sqrt(c / n2)
                        for a in range(d):
                            Vm[i, a] *= s
                    it += 1
                    inner += 1
                defect = _defect(Vm, N, d, c, NULL)
    finally:
        free(G)
    return out, it, defect
