"""The metric function F and the tensors built from it.

Scalar functions (B, j, F, A, L) accept vectors from every sector.  The
tensor operations need a future-timelike point away from the time axis: the
spatial norm enters F through a term linear in ``|R|``, so derivatives of F
blow up like ``1/|R|`` near the axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._fd import central_first_batch
from .errors import AccuracyError, DomainError, SingularityError
from .params import (
    CouplingParams,
    EventVector,
    MomentumCovector,
    VectorLike,
    _coerce_params,
    as_components,
    require_future_timelike,
)

AXIS_TUBE = 1e-6
CARTAN_STEP = 1e-4
SIGNATURE_THRESHOLD = 1e-10


def _factors(p: CouplingParams, x: np.ndarray):
    m = math.sqrt(float(np.dot(x[1:], x[1:])))
    return x[0] + p.g_minus * m, x[0] + p.g_plus * m, m


def quadratic_form_B(p, R: VectorLike) -> float:
    p = _coerce_params(p)
    u, v, _ = _factors(p, as_components(R))
    return -u * v


def weight_j(p, R: VectorLike) -> float:
    p = _coerce_params(p)
    u, v, _ = _factors(p, as_components(R))
    if u == 0.0 or v == 0.0:
        raise SingularityError("weight j is singular on the isotropic cone (a factor of B vanishes)")
    return abs(u / v) ** (-0.25 * p.G)


def fmf_F(p, R: VectorLike) -> float:
    """Finsleroid metric function; zero on the isotropic cone."""
    p = _coerce_params(p)
    x = as_components(R)
    if not np.any(x):
        raise DomainError("metric function needs a nonzero vector")
    return float(kernels.fmf(p.g, x[None, :])[0])


def func_A(p, R: VectorLike) -> float:
    p = _coerce_params(p)
    x = as_components(R)
    return float(x[0] - 0.5 * p.g * math.sqrt(float(np.dot(x[1:], x[1:]))))


def func_L(p, R: VectorLike) -> float:
    p = _coerce_params(p)
    x = as_components(R)
    return float(math.sqrt(float(np.dot(x[1:], x[1:]))) - 0.5 * p.g * x[0])


def covector_of(p, R: VectorLike) -> MomentumCovector:
    """Lower the index with half the gradient of F squared.

    Uses the logarithmic derivative of the factorised form, which holds in
    every non-isotropic sector.  On the axis the spatial part is exactly zero.
    """
    p = _coerce_params(p)
    x = as_components(R)
    u, v, m = _factors(p, x)
    if u == 0.0 or v == 0.0:
        raise SingularityError("covector is singular on the isotropic cone")
    half_F2 = 0.5 * fmf_F(p, x) ** 2
    d0 = p.G_plus / u - p.G_minus / v
    ds = p.G_plus * p.g_minus / u - p.G_minus * p.g_plus / v
    spatial = ds * x[1:] / m if m > 0 else np.zeros_like(x[1:])
    return MomentumCovector(half_F2 * d0, half_F2 * spatial)


def derivative_scale(p: CouplingParams, x: np.ndarray) -> float:
    """Length below which a difference stencil around ``x`` stays smooth.

    Bounded by F/h, by the distance to the axis and by the future-cone
    factor of B.
    """
    u, _, m = _factors(p, x)
    return min(fmf_F(p, x) / p.h, m, u)


def _check_off_axis(p: CouplingParams, x: np.ndarray, what: str) -> None:
    m = math.sqrt(float(np.dot(x[1:], x[1:])))
    if m < AXIS_TUBE * fmf_F(p, x):
        raise SingularityError(f"{what} is not defined inside the axis tube |R| < {AXIS_TUBE:g}*F")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MetricTensor:
    point: EventVector
    components: np.ndarray
    inverse: np.ndarray

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.components))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.components)

    def signature(self, threshold: float = SIGNATURE_THRESHOLD) -> tuple[int, int]:
        """Counts of (positive, negative) eigenvalues, relative threshold on the largest."""
        ev = self.eigenvalues()
        cut = threshold * float(np.max(np.abs(ev)))
        return int(np.sum(ev > cut)), int(np.sum(ev < -cut))

    def lower(self, U) -> np.ndarray:
        return self.components @ np.asarray(U, dtype=float)

    def norm_squared(self, U) -> float:
        U = np.asarray(U, dtype=float)
        return float(U @ self.components @ U)


def _metric_from_components(x: np.ndarray, comps: np.ndarray) -> MetricTensor:
    return MetricTensor(EventVector.from_array(x), _frozen(comps), _frozen(np.linalg.inv(comps)))


def metric_tensor(p, R: VectorLike) -> MetricTensor:
    """Metric tensor by pullback of the quasi-pseudoeuclidean tensor."""
    p = _coerce_params(p)
    x = require_future_timelike(p, R, "metric tensor point")
    _check_off_axis(p, x, "metric tensor")
    return _metric_from_components(x, kernels.metric(p.g, x[None, :])[0])


@dataclass(frozen=True, eq=False)
class CartanTensor:
    point: EventVector
    components: np.ndarray
    contraction: np.ndarray
    metric: MetricTensor
    step: float

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def norm_squared(self) -> float:
        """``C_t C^t`` with the index raised by the inverse metric."""
        C = self.contraction
        return float(C @ self.metric.inverse @ C)

    def angular_metric(self) -> np.ndarray:
        """``h_pq = g_pq - l_p l_q`` with ``l`` the normalised covector."""
        g = self.metric.components
        R = self.point.components
        Rl = g @ R
        F2 = float(R @ Rl)
        return g - np.outer(Rl, Rl) / F2

    def algebraic_form(self) -> np.ndarray:
        """The reducible form built from ``h_pq`` and ``C_p`` alone."""
        C = self.contraction
        hh = self.angular_metric()
        cc = self.norm_squared()
        N = self.dim
        out = (
            np.einsum("pq,r->pqr", hh, C)
            + np.einsum("pr,q->pqr", hh, C)
            + np.einsum("qr,p->pqr", hh, C)
        )
        if cc != 0.0:
            out = out - np.einsum("p,q,r->pqr", C, C, C) / cc
        return out / N

    def form_residual(self) -> float:
        """Max-norm of ``C - algebraic_form`` relative to ``C`` (0 when C vanishes)."""
        scale = float(np.max(np.abs(self.components)))
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.components - self.algebraic_form())) / scale)

    def mixed(self) -> np.ndarray:
        """``C_p^t_r``: middle index raised."""
        return np.einsum("ptr,tu->pur", self.components, self.metric.inverse)

    def curvature_tensor(self) -> np.ndarray:
        """``S_pqrs = C_tqr C_p^t_s - C_tqs C_p^t_r``."""
        C = self.components
        Cm = self.mixed()
        return np.einsum("tqr,pts->pqrs", C, Cm) - np.einsum("tqs,ptr->pqrs", C, Cm)


def _sym3(C: np.ndarray) -> np.ndarray:
    perms = ("pqr", "prq", "qpr", "qrp", "rpq", "rqp")
    return sum(np.einsum(f"pqr->{q}", C) for q in perms) / 6.0


def cartan_tensor(p, R: VectorLike, step: float = CARTAN_STEP, levels: int = 1, symmetrize: bool = True) -> CartanTensor:
    """Cartan tensor as half the central difference of the metric tensor.

    The step is ``step * derivative_scale``; ``levels`` Richardson levels
    are applied on top of the central difference.
    """
    p = _coerce_params(p)
    x = require_future_timelike(p, R, "Cartan tensor point")
    _check_off_axis(p, x, "Cartan tensor")
    e = step * derivative_scale(p, x)
    if not e > 1e-13 * float(np.max(np.abs(x))):
        raise AccuracyError(
            f"difference step {e:.3g} underflows at this point (too close to the cone or axis)"
        )
    reach = e * 2.0**levels
    if reach >= derivative_scale(p, x):
        raise AccuracyError("difference stencil would leave the smooth region")
    D, _ = central_first_batch(lambda X: kernels.metric(p.g, X), x, e, levels)
    C = 0.5 * D
    if symmetrize:
        C = _sym3(C)
    g = _metric_from_components(x, kernels.metric(p.g, x[None, :])[0])
    Cp = np.einsum("pqr,qr->p", C, g.inverse)
    return CartanTensor(EventVector.from_array(x), _frozen(C), _frozen(Cp), g, e)


def curvature_fit(p, R: VectorLike, cartan: CartanTensor | None = None) -> tuple[float, float]:
    """Least-squares fit of ``S_pqrs`` to ``S* (h_pr h_qs - h_ps h_qr) / F^2``.

    Returns ``(S*, relative residual)``; the residual is 0 when S vanishes.
    """
    p = _coerce_params(p)
    ct = cartan if cartan is not None else cartan_tensor(p, R)
    S = ct.curvature_tensor()
    hh = ct.angular_metric()
    F2 = fmf_F(p, ct.point) ** 2
    base = (np.einsum("pr,qs->pqrs", hh, hh) - np.einsum("ps,qr->pqrs", hh, hh)) / F2
    s_star = float(np.sum(S * base) / np.sum(base * base))
    scale = float(np.max(np.abs(S)))
    resid = 0.0 if scale == 0.0 else float(np.max(np.abs(S - s_star * base)) / scale)
    return s_star, resid


def curvature_check(p, R: VectorLike) -> float:
    """Fitted curvature scalar ``S*``; expected ``g**2 / 4``."""
    return curvature_fit(p, R)[0]


def implied_indicatrix_curvature(s_star: float) -> float:
    return -(1.0 + s_star)
