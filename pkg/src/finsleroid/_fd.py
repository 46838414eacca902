"""Central differences with Richardson extrapolation (shared core)."""
from __future__ import annotations

import numpy as np


def richardson(estimates):
    """Extrapolate central-difference estimates taken at steps ``e, 2e, 4e, ...``.

    The error of a central difference is a series in even powers of the step,
    so level ``k`` removes the ``e**(2k)`` term.  Returns ``(value, error)``
    where ``error`` is the magnitude of the last correction.
    """
    row = [np.asarray(x, dtype=float) for x in estimates]
    err = np.zeros_like(row[0])
    level = 1
    while len(row) > 1:
        f = 4.0**level
        nxt = [(f * row[i] - row[i + 1]) / (f - 1.0) for i in range(len(row) - 1)]
        err = np.abs(nxt[0] - row[0])
        row = nxt
        level += 1
    return row[0], err


def central_first_batch(fbatch, x, step, levels=1):
    """Derivatives of an array-valued field along every coordinate.

    ``fbatch`` maps an ``(n, N)`` array of points to an ``(n, ...)`` array.
    Returns ``(D, err)`` with the differentiation index last.
    """
    x = np.asarray(x, dtype=float)
    N = x.size
    steps = step * 2.0 ** np.arange(levels + 1)
    pts = []
    for r in range(N):
        for e in steps:
            xp = x.copy()
            xp[r] += e
            xm = x.copy()
            xm[r] -= e
            pts.append(xp)
            pts.append(xm)
    vals = np.asarray(fbatch(np.array(pts)))
    vals = vals.reshape((N, levels + 1, 2) + vals.shape[1:])
    ests = [(vals[:, k, 0] - vals[:, k, 1]) / (2.0 * steps[k]) for k in range(levels + 1)]
    D, err = richardson(ests)
    return np.moveaxis(D, 0, -1), np.moveaxis(err, 0, -1)


def hessian_batch(fbatch, x, step, levels=1):
    """Second derivatives of a scalar field by the four-point mixed stencil."""
    x = np.asarray(x, dtype=float)
    N = x.size
    steps = step * 2.0 ** np.arange(levels + 1)
    eye = np.eye(N)
    pts = []
    for e in steps:
        for i in range(N):
            for j in range(N):
                for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                    pts.append(x + e * (si * eye[i] + sj * eye[j]))
    vals = np.asarray(fbatch(np.array(pts)), dtype=float).reshape(levels + 1, N, N, 4)
    ests = [
        (vals[k, :, :, 0] - vals[k, :, :, 1] - vals[k, :, :, 2] + vals[k, :, :, 3]) / (4.0 * steps[k] ** 2)
        for k in range(levels + 1)
    ]
    H, err = richardson(ests)
    return 0.5 * (H + H.T), err
