"""Quasi-pseudoeuclidean transformation and the image space.

``sigma`` maps the Finsleroid space onto coordinates ``t`` in which the metric
function becomes the Minkowski norm ``S(t)`` and the metric tensor takes the
simple form ``n_ij``.  Only the future-timelike sector (``t0 > |t|`` on the
image side) is supported.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, SingularityError
from .metric import MetricTensor, _check_off_axis, _frozen, _metric_from_components
from .params import (
    CouplingParams,
    EventVector,
    VectorLike,
    _coerce_params,
    as_components,
    require_future_timelike,
)


@dataclass(frozen=True)
class QPoint:
    """Image coordinates ``t = sigma(R)``; ``m`` caches the spatial norm."""

    t0: float
    spatial: tuple
    m: float = float("nan")

    def __post_init__(self):
        object.__setattr__(self, "t0", float(self.t0))
        sp = tuple(float(a) for a in self.spatial)
        object.__setattr__(self, "spatial", sp)
        object.__setattr__(self, "m", math.sqrt(sum(a * a for a in sp)))

    @classmethod
    def from_array(cls, t) -> "QPoint":
        t = np.asarray(t, dtype=float)
        return cls(t[0], t[1:])

    @property
    def components(self) -> np.ndarray:
        return np.array((self.t0, *self.spatial))

    def __array__(self, dtype=None, copy=None):
        out = self.components
        return out if dtype is None else out.astype(dtype)

    def __len__(self) -> int:
        return 1 + len(self.spatial)


@dataclass(frozen=True, eq=False)
class JacobianPair:
    forward: np.ndarray  # [i, p] = d sigma^i / d R^p
    backward: np.ndarray  # [p, i] = d mu^p / d t^i

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.forward))

    def inversion_residual(self) -> float:
        N = self.forward.shape[0]
        return float(np.max(np.abs(self.forward @ self.backward - np.eye(N))))


def _eta(N: int) -> np.ndarray:
    e = -np.ones(N)
    e[0] = 1.0
    return e


def s_norm(t: VectorLike) -> float:
    t = as_components(t)
    m2 = float(np.dot(t[1:], t[1:]))
    return math.sqrt(abs(t[0] * t[0] - m2))


def _require_inside_quasicone(t: np.ndarray, what: str) -> None:
    m = math.sqrt(float(np.dot(t[1:], t[1:])))
    if t[0] <= 0 or abs(t[0] - m) <= 1e-12 * max(abs(t[0]), m):
        raise SingularityError(f"{what}: t lies on the quasi-isotropic cone |t0| = |t| or has t0 <= 0")
    if t[0] < m:
        raise DomainError(f"{what}: t must lie inside the future quasi-cone t0 > |t|")


def sigma(p, R: VectorLike) -> QPoint:
    p = _coerce_params(p)
    x = require_future_timelike(p, R, "sigma argument")
    return QPoint.from_array(kernels.sigma(p.g, x[None, :])[0])


def mu(p, t: VectorLike) -> EventVector:
    p = _coerce_params(p)
    t = as_components(t)
    _require_inside_quasicone(t, "mu")
    return EventVector.from_array(kernels.mu(p.g, t[None, :])[0])


def sigma_jacobian(p, R: VectorLike) -> JacobianPair:
    """Forward Jacobian at ``R`` with the inverse map's Jacobian at ``sigma(R)``."""
    p = _coerce_params(p)
    x = require_future_timelike(p, R, "Jacobian point")
    if p.g != 0.0:
        _check_off_axis(p, x, "sigma Jacobian")
    t = kernels.sigma(p.g, x[None, :])
    fwd = kernels.sigma_jacobian(p.g, x[None, :])[0]
    bwd = kernels.mu_jacobian(p.g, t)[0]
    return JacobianPair(_frozen(fwd), _frozen(bwd))


def mu_jacobian(p, t: VectorLike) -> np.ndarray:
    p = _coerce_params(p)
    t = as_components(t)
    _require_inside_quasicone(t, "mu Jacobian")
    return kernels.mu_jacobian(p.g, t[None, :])[0]


def _unit(t: np.ndarray):
    eta = _eta(t.size)
    S = s_norm(t)
    if S == 0.0:
        raise DomainError("t is quasi-isotropic (S(t) = 0)")
    lu = t / S
    return lu, eta * lu, S, eta


def n_tensor(p, t: VectorLike) -> tuple[np.ndarray, np.ndarray]:
    """Quasi-pseudoeuclidean metric ``(n_ij, n^ij)`` at image point ``t``."""
    p = _coerce_params(p)
    lu, ll, _, eta = _unit(as_components(t))
    lower = np.diag(eta) / p.h**2 + 0.25 * p.G**2 * np.outer(ll, ll)
    upper = p.h**2 * np.diag(eta) - 0.25 * p.g**2 * np.outer(lu, lu)
    return lower, upper


def pullback_metric(p, R: VectorLike) -> MetricTensor:
    """``g_pq = n_ij(sigma(R)) t^i_p t^j_q`` assembled from this module's pieces."""
    p = _coerce_params(p)
    x = require_future_timelike(p, R, "pullback point")
    _check_off_axis(p, x, "pullback metric")
    t = kernels.sigma(p.g, x[None, :])[0]
    J = kernels.sigma_jacobian(p.g, x[None, :])[0]
    n_low, _ = n_tensor(p, t)
    return _metric_from_components(x, J.T @ n_low @ J)


def christoffel(p, t: VectorLike) -> np.ndarray:
    """Christoffel symbols of ``n_ij``; entry ``[m, i, j]`` is the symbol with upper index ``m``.

    Closed form ``(G^2/4) L^m H_ij / S`` with ``L = t/S`` and
    ``H_ij = e_ij - L_i L_j``.
    """
    p = _coerce_params(p)
    t = as_components(t)
    _require_inside_quasicone(t, "christoffel")
    lu, ll, S, eta = _unit(t)
    H = np.diag(eta) - np.outer(ll, ll)
    return 0.25 * p.G**2 * np.einsum("m,ij->mij", lu, H) / S


def transverse_projector(t: VectorLike) -> np.ndarray:
    """``H_ij = e_ij - L_i L_j`` at ``t``."""
    lu, ll, _, eta = _unit(as_components(t))
    return np.diag(eta) - np.outer(ll, ll)
