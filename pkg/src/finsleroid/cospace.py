"""Momentum space: Hamiltonian function, co-angle and co-scalar product."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError
from .geodesics import _RADICAND_TOL, _hyperbolic_angle
from .metric import covector_of, fmf_F, metric_tensor
from .params import CouplingParams, VectorLike, _coerce_params, as_components, require_future_cotimelike


def _cofactors(p: CouplingParams, P: np.ndarray):
    n = math.sqrt(float(np.dot(P[1:], P[1:])))
    # P0 - |P|/g_sup_plus and P0 - |P|/g_sup_minus
    return P[0] - n / p.g_sup_plus, P[0] - n / p.g_sup_minus, n


def fhf_H(p, P: VectorLike) -> float:
    p = _coerce_params(p)
    x = as_components(P)
    if not np.any(x):
        raise DomainError("Hamiltonian function needs a nonzero covector")
    u, v, _ = _cofactors(p, x)
    return abs(u) ** (0.5 * p.G_sup_plus) * abs(v) ** (-0.5 * p.G_sup_minus)


@dataclass(frozen=True)
class CoScalars:
    B_hat: float
    j_hat: float
    H: float
    A_hat: float
    L_hat: float


def co_scalars(p, P: VectorLike) -> CoScalars:
    p = _coerce_params(p)
    x = as_components(P)
    u, v, n = _cofactors(p, x)
    if u == 0.0 or v == 0.0:
        raise SingularityError("j_hat is singular on the isotropic co-cone")
    return CoScalars(
        B_hat=-u * v,
        j_hat=abs(u / v) ** (0.25 * p.G),
        H=fhf_H(p, x),
        A_hat=float(x[0] + 0.5 * p.g * n),
        L_hat=float(n + 0.5 * p.g * x[0]),
    )


def _co_unit(p: CouplingParams, x: np.ndarray) -> np.ndarray:
    u, v, n = _cofactors(p, x)
    sb = math.sqrt(abs(u * v))
    out = np.empty_like(x)
    out[0] = (x[0] + 0.5 * p.g * n) / sb
    out[1:] = p.h * x[1:] / sb
    return out


def co_angle(p, P1: VectorLike, P2: VectorLike) -> float:
    p = _coerce_params(p)
    x1 = require_future_cotimelike(p, P1, "P1")
    x2 = require_future_cotimelike(p, P2, "P2")
    return _hyperbolic_angle(_co_unit(p, x1), _co_unit(p, x2)) / p.h


def co_scalar_product(p, P1: VectorLike, P2: VectorLike) -> float:
    p = _coerce_params(p)
    return fhf_H(p, P1) * fhf_H(p, P2) * math.cosh(co_angle(p, P1, P2))


def co_distance(p, P1: VectorLike, P2: VectorLike) -> float:
    p = _coerce_params(p)
    a = co_angle(p, P1, P2)
    H1, H2 = fhf_H(p, P1), fhf_H(p, P2)
    d2 = (H1 - H2) ** 2 - 4.0 * H1 * H2 * math.sinh(0.5 * a) ** 2
    if d2 < 0.0:
        if d2 >= -_RADICAND_TOL * H1 * H2:
            return 0.0
        raise DomainError(f"co-distance radicand {d2:.6g} < 0")
    return math.sqrt(d2)


def legendre_duality_check(p, R: VectorLike) -> float:
    """Relative mismatch ``|H(covector_of(R)) - F(R)| / F(R)``."""
    p = _coerce_params(p)
    F = fmf_F(p, R)
    return abs(fhf_H(p, covector_of(p, R)) - F) / F


def dual_metric(p, R: VectorLike) -> np.ndarray:
    """``g^pq`` at the covector Legendre-dual to ``R`` (inverse of ``g_pq(R)``)."""
    return np.array(metric_tensor(p, R).inverse)
