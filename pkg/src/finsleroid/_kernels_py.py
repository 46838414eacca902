"""Vectorised numpy kernels.

Batched over rows of an ``(n, N)`` array, ``N = d + 1``.  These are the
fallback for ``_kernels_c`` and must stay numerically interchangeable with it;
``tests/test_kernels.py`` compares the two.  No sector checks happen here:
callers guarantee future-timelike input with a nonzero spatial part wherever a
Jacobian is involved (an exactly zero spatial part is treated as direction 0).
"""
import numpy as np

NAME = "python"


def _consts(g):
    h = np.sqrt(1.0 + 0.25 * g * g)
    if g >= 0:
        gp = 1.0 / (h + 0.5 * g)
        gm = -0.5 * g - h
    else:
        gp = h - 0.5 * g
        gm = -1.0 / gp
    return h, g / h, gp, gm


def _split(X):
    X = np.ascontiguousarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ValueError("expected an (n, d+1) array with d >= 1")
    x0 = X[:, 0]
    xs = X[:, 1:]
    m = np.sqrt(np.einsum("ij,ij->i", xs, xs))
    return X, x0, xs, m


def _directions(xs, m):
    safe = np.where(m > 0, m, 1.0)
    return np.where((m > 0)[:, None], xs / safe[:, None], 0.0)


def fmf(g, R):
    _, r0, _, m = _split(R)
    h, G, gp, gm = _consts(g)
    u = np.abs(r0 + gm * m)
    v = np.abs(r0 + gp * m)
    return u ** (0.5 - 0.25 * G) * v ** (0.5 + 0.25 * G)


def sigma(g, R):
    R, r0, xs, m = _split(R)
    h, G, gp, gm = _consts(g)
    j = (np.abs(r0 + gm * m) / np.abs(r0 + gp * m)) ** (-0.25 * G)
    out = np.empty_like(R)
    out[:, 0] = j * (r0 - 0.5 * g * m)
    out[:, 1:] = (h * j)[:, None] * xs
    return out


def mu(g, T):
    T, t0, ts, m = _split(T)
    h, G, _, _ = _consts(g)
    kappa = (np.abs(t0 - m) / np.abs(t0 + m)) ** (0.25 * G)
    out = np.empty_like(T)
    out[:, 0] = kappa * (t0 + 0.5 * G * m)
    out[:, 1:] = (kappa / h)[:, None] * ts
    return out


def sigma_jacobian(g, R):
    """``J[k, i, p] = d sigma^i / d R^p`` at each row ``R[k]``."""
    R, r0, xs, m = _split(R)
    h, G, gp, gm = _consts(g)
    n, N = R.shape
    u = r0 + gm * m
    v = r0 + gp * m
    uv = u * v
    j = (np.abs(u) / np.abs(v)) ** (-0.25 * G)
    nd = _directions(xs, m)
    # gradient of log j
    dlj = np.empty((n, N))
    dlj[:, 0] = -0.5 * g * m / uv
    dlj[:, 1:] = (0.5 * g * r0 / uv)[:, None] * nd
    A = r0 - 0.5 * g * m
    J = np.empty((n, N, N))
    J[:, 0, :] = (j * A)[:, None] * dlj
    J[:, 0, 0] += j
    J[:, 0, 1:] -= (0.5 * g * j)[:, None] * nd
    J[:, 1:, :] = (h * j)[:, None, None] * xs[:, :, None] * dlj[:, None, :]
    idx = np.arange(1, N)
    J[:, idx, idx] += (h * j)[:, None]
    return J


def mu_jacobian(g, T):
    """``M[k, p, i] = d mu^p / d t^i`` at each row ``T[k]``."""
    T, t0, ts, m = _split(T)
    h, G, _, _ = _consts(g)
    n, N = T.shape
    S2 = (t0 - m) * (t0 + m)
    kappa = (np.abs(t0 - m) / np.abs(t0 + m)) ** (0.25 * G)
    nd = _directions(ts, m)
    dlk = np.empty((n, N))
    dlk[:, 0] = 0.5 * G * m / S2
    dlk[:, 1:] = (-0.5 * G * t0 / S2)[:, None] * nd
    M = np.empty((n, N, N))
    M[:, 0, :] = (kappa * (t0 + 0.5 * G * m))[:, None] * dlk
    M[:, 0, 0] += kappa
    M[:, 0, 1:] += (0.5 * G * kappa)[:, None] * nd
    M[:, 1:, :] = (kappa / h)[:, None, None] * ts[:, :, None] * dlk[:, None, :]
    idx = np.arange(1, N)
    M[:, idx, idx] += (kappa / h)[:, None]
    return M


def metric(g, R):
    """Pullback ``g_pq = n_ij(sigma(R)) t^i_p t^j_q``."""
    h, G, _, _ = _consts(g)
    t = sigma(g, R)
    J = sigma_jacobian(g, R)
    n, N = t.shape
    tl = t.copy()
    tl[:, 1:] *= -1.0
    S = np.sqrt(np.abs(np.einsum("ki,ki->k", t, tl)))
    l = tl / S[:, None]
    eta = np.full(N, -1.0)
    eta[0] = 1.0
    nl = 0.25 * G * G * l[:, :, None] * l[:, None, :]
    nl += np.diag(eta / (h * h))[None, :, :]
    return np.einsum("kip,kij,kjq->kpq", J, nl, J)
