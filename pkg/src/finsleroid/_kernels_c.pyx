# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, pow

cnp.import_array()

NAME = "cython"


cdef inline double _g_plus(double g, double h) nogil:
    # h - g/2 and h + g/2 are reciprocal; avoid the cancelling difference
    return 1.0 / (h + 0.5 * g) if g >= 0 else h - 0.5 * g


cdef inline double _g_minus(double g, double h) nogil:
    return -0.5 * g - h if g >= 0 else -1.0 / (h - 0.5 * g)


cdef inline double _norm_tail(const double[:, ::1] X, Py_ssize_t k, Py_ssize_t N) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t a
    for a in range(1, N):
        acc += X[k, a] * X[k, a]
    return sqrt(acc)


def _as2d(X):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ValueError("expected an (n, d+1) array with d >= 1")
    return X


def fmf(double g, X):
    X = _as2d(X)
    cdef const double[:, ::1] R = X
    cdef Py_ssize_t n = R.shape[0], N = R.shape[1], k
    cdef double h = sqrt(1.0 + 0.25 * g * g)
    cdef double G = g / h, gp = _g_plus(g, h), gm = _g_minus(g, h)
    cdef double q = 0.25 * G, m, u, v
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for k in range(n):
            m = _norm_tail(R, k, N)
            u = fabs(R[k, 0] + gm * m)
            v = fabs(R[k, 0] + gp * m)
            # |u|^(1/2 - q) |v|^(1/2 + q) with a single pow; zero on the cone
            if u == 0.0 or v == 0.0:
                o[k] = 0.0
            else:
                o[k] = sqrt(u * v) * pow(v / u, q)
    return out


def sigma(double g, X):
    X = _as2d(X)
    cdef const double[:, ::1] R = X
    cdef Py_ssize_t n = R.shape[0], N = R.shape[1], k, a
    cdef double h = sqrt(1.0 + 0.25 * g * g)
    cdef double G = g / h, gp = _g_plus(g, h), gm = _g_minus(g, h)
    cdef double m, j
    out = np.empty((n, N))
    cdef double[:, ::1] o = out
    with nogil:
        for k in range(n):
            m = _norm_tail(R, k, N)
            j = pow(fabs(R[k, 0] + gm * m) / fabs(R[k, 0] + gp * m), -0.25 * G)
            o[k, 0] = j * (R[k, 0] - 0.5 * g * m)
            for a in range(1, N):
                o[k, a] = h * j * R[k, a]
    return out


def mu(double g, X):
    X = _as2d(X)
    cdef const double[:, ::1] T = X
    cdef Py_ssize_t n = T.shape[0], N = T.shape[1], k, a
    cdef double h = sqrt(1.0 + 0.25 * g * g)
    cdef double G = g / h
    cdef double m, kap, t0
    out = np.empty((n, N))
    cdef double[:, ::1] o = out
    with nogil:
        for k in range(n):
            m = _norm_tail(T, k, N)
            t0 = T[k, 0]
            kap = pow(fabs(t0 - m) / fabs(t0 + m), 0.25 * G)
            o[k, 0] = kap * (t0 + 0.5 * G * m)
            for a in range(1, N):
                o[k, a] = kap / h * T[k, a]
    return out


cdef void _sigma_jac_row(double g, double h, double G, double gp, double gm,
                         const double[:, ::1] R, Py_ssize_t k, Py_ssize_t N,
                         double* J, double* t) noexcept nogil:
    # J is a row-major N x N scratch: J[i*N + p] = d sigma^i / d R^p; t receives sigma(R).
    cdef double m = _norm_tail(R, k, N)
    cdef double r0 = R[k, 0]
    cdef double u = r0 + gm * m, v = r0 + gp * m
    cdef double uv = u * v
    cdef double j = pow(fabs(u) / fabs(v), -0.25 * G)
    cdef double A = r0 - 0.5 * g * m
    cdef double inv_m = 1.0 / m if m > 0 else 0.0
    cdef double dl0 = -0.5 * g * m / uv
    cdef double cs = 0.5 * g * r0 / uv * inv_m
    cdef Py_ssize_t a, b
    t[0] = j * A
    J[0] = j * A * dl0 + j
    for b in range(1, N):
        J[b] = j * A * cs * R[k, b] - 0.5 * g * j * R[k, b] * inv_m
    for a in range(1, N):
        t[a] = h * j * R[k, a]
        J[a * N] = h * j * R[k, a] * dl0
        for b in range(1, N):
            J[a * N + b] = h * j * R[k, a] * cs * R[k, b]
        J[a * N + a] += h * j


def sigma_jacobian(double g, X):
    X = _as2d(X)
    cdef const double[:, ::1] R = X
    cdef Py_ssize_t n = R.shape[0], N = R.shape[1], k, i
    cdef double h = sqrt(1.0 + 0.25 * g * g)
    cdef double G = g / h, gp = _g_plus(g, h), gm = _g_minus(g, h)
    out = np.empty((n, N, N))
    cdef double[:, :, ::1] o = out
    tbuf = np.empty(N)
    cdef double[::1] t = tbuf
    with nogil:
        for k in range(n):
            _sigma_jac_row(g, h, G, gp, gm, R, k, N, &o[k, 0, 0], &t[0])
    return out


def mu_jacobian(double g, X):
    X = _as2d(X)
    cdef const double[:, ::1] T = X
    cdef Py_ssize_t n = T.shape[0], N = T.shape[1], k, a, b
    cdef double h = sqrt(1.0 + 0.25 * g * g)
    cdef double G = g / h
    cdef double m, t0, S2, kap, inv_m, dl0, cs, c0
    out = np.empty((n, N, N))
    cdef double[:, :, ::1] o = out
    with nogil:
        for k in range(n):
            m = _norm_tail(T, k, N)
            t0 = T[k, 0]
            S2 = (t0 - m) * (t0 + m)
            kap = pow(fabs(t0 - m) / fabs(t0 + m), 0.25 * G)
            inv_m = 1.0 / m if m > 0 else 0.0
            dl0 = 0.5 * G * m / S2
            cs = -0.5 * G * t0 / S2 * inv_m
            c0 = kap * (t0 + 0.5 * G * m)
            o[k, 0, 0] = c0 * dl0 + kap
            for b in range(1, N):
                o[k, 0, b] = c0 * cs * T[k, b] + 0.5 * G * kap * T[k, b] * inv_m
            for a in range(1, N):
                o[k, a, 0] = kap / h * T[k, a] * dl0
                for b in range(1, N):
                    o[k, a, b] = kap / h * T[k, a] * cs * T[k, b]
                o[k, a, a] += kap / h
    return out


def metric(double g, X):
    X = _as2d(X)
    cdef const double[:, ::1] R = X
    cdef Py_ssize_t n = R.shape[0], N = R.shape[1], k, i, j, p, q
    cdef double h = sqrt(1.0 + 0.25 * g * g)
    cdef double G = g / h, gp = _g_plus(g, h), gm = _g_minus(g, h)
    cdef double S, acc, w = 0.25 * G * G, ih2 = 1.0 / (h * h)
    out = np.empty((n, N, N))
    cdef double[:, :, ::1] o = out
    jb = np.empty((N, N))
    tb = np.empty(N)
    lb = np.empty(N)
    nb = np.empty((N, N))
    wb = np.empty((N, N))
    cdef double[:, ::1] J = jb
    cdef double[::1] t = tb
    cdef double[::1] l = lb
    cdef double[:, ::1] nl = nb
    cdef double[:, ::1] W = wb
    with nogil:
        for k in range(n):
            _sigma_jac_row(g, h, G, gp, gm, R, k, N, &J[0, 0], &t[0])
            acc = t[0] * t[0]
            for i in range(1, N):
                acc -= t[i] * t[i]
            S = sqrt(fabs(acc))
            l[0] = t[0] / S
            for i in range(1, N):
                l[i] = -t[i] / S
            for i in range(N):
                for j in range(N):
                    nl[i, j] = w * l[i] * l[j]
            nl[0, 0] += ih2
            for i in range(1, N):
                nl[i, i] -= ih2
            # W = nl @ J, then o = J^T @ W
            for i in range(N):
                for q in range(N):
                    acc = 0.0
                    for j in range(N):
                        acc += nl[i, j] * J[j, q]
                    W[i, q] = acc
            for p in range(N):
                for q in range(p, N):
                    acc = 0.0
                    for i in range(N):
                        acc += J[i, p] * W[i, q]
                    o[k, p, q] = acc
                    o[k, q, p] = acc
    return out
