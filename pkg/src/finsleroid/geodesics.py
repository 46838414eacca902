"""Angle, scalar product, distance and closed-form geodesics.

All of it rests on one picture: in image coordinates ``t = sigma(R)`` a
future-timelike vector is ``F * l`` with ``l`` on the unit hyperboloid, and
the Finsleroid angle between two vectors is the hyperbolic angle between their
``l``'s divided by ``h``.  In the (F, angle) plane the geodesic is a straight
Minkowski segment, which is where the cosine theorem and the quadratic law
for ``F**2`` along the curve come from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateCurveError, DomainError, PreconditionError, SingularityError
from .metric import cartan_tensor, fmf_F, metric_tensor
from .params import (
    CouplingParams,
    EventVector,
    VectorLike,
    _coerce_params,
    as_components,
    require_future_timelike,
)

UNIT_VELOCITY_TOL = 1e-8
_RADICAND_TOL = 1e-14
_BOUNDS_TOL = 1e-12


def _B_abs_sqrt(p: CouplingParams, x: np.ndarray) -> float:
    m = math.sqrt(float(np.dot(x[1:], x[1:])))
    return math.sqrt(abs((x[0] + p.g_minus * m) * (x[0] + p.g_plus * m)))


def _image_unit(p: CouplingParams, x: np.ndarray) -> np.ndarray:
    """``(A, h R^a) / sqrt|B|``: the unit-hyperboloid direction of ``sigma(x)``."""
    m = math.sqrt(float(np.dot(x[1:], x[1:])))
    sb = _B_abs_sqrt(p, x)
    out = np.empty_like(x)
    out[0] = (x[0] - 0.5 * p.g * m) / sb
    out[1:] = p.h * x[1:] / sb
    return out


def _minkowski(a: np.ndarray, b: np.ndarray) -> float:
    return float(a[0] * b[0] - np.dot(a[1:], b[1:]))


def _hyperbolic_angle(l1: np.ndarray, l2: np.ndarray) -> float:
    """Hyperbolic angle between unit future-timelike vectors.

    ``2 asinh(|l1 - l2| / 2)`` equals ``arccosh(<l1, l2>)`` but keeps full
    relative precision for nearly parallel vectors.
    """
    cosh_arg = _minkowski(l1, l2)
    if cosh_arg < 1.0 - 1e-12:
        raise DomainError(f"angle: arccosh argument {cosh_arg!r} < 1")
    d = l1 - l2
    chord2 = max(-_minkowski(d, d), 0.0)
    return 2.0 * math.asinh(0.5 * math.sqrt(chord2))


def angle(p, R1: VectorLike, R2: VectorLike) -> float:
    p = _coerce_params(p)
    x1 = require_future_timelike(p, R1, "R1")
    x2 = require_future_timelike(p, R2, "R2")
    return _hyperbolic_angle(_image_unit(p, x1), _image_unit(p, x2)) / p.h


def scalar_product(p, R1: VectorLike, R2: VectorLike) -> float:
    p = _coerce_params(p)
    a = angle(p, R1, R2)
    return fmf_F(p, R1) * fmf_F(p, R2) * math.cosh(a)


def _chord_squared(F1: float, F2: float, alpha: float) -> float:
    # F1^2 + F2^2 - 2 F1 F2 cosh(alpha), arranged to avoid cancellation
    return (F1 - F2) ** 2 - 4.0 * F1 * F2 * math.sinh(0.5 * alpha) ** 2


def distance(p, R1: VectorLike, R2: VectorLike) -> float:
    """Two-point distance from the cosine theorem."""
    p = _coerce_params(p)
    a = angle(p, R1, R2)
    F1, F2 = fmf_F(p, R1), fmf_F(p, R2)
    d2 = _chord_squared(F1, F2, a)
    if d2 < 0.0:
        if d2 >= -_RADICAND_TOL * F1 * F2:
            return 0.0
        raise DomainError(
            f"distance radicand F1^2 + F2^2 - 2<R1,R2> = {d2:.6g} < 0: "
            "endpoints are not joined by a timelike chord"
        )
    return math.sqrt(d2)


def axis_angle(p, R: VectorLike) -> float:
    """Angle between ``R`` and the time axis."""
    p = _coerce_params(p)
    x = require_future_timelike(p, R, "R")
    m = math.sqrt(float(np.dot(x[1:], x[1:])))
    # sinh of the hyperbolic angle is h|R|/sqrt|B|
    return math.asinh(p.h * m / _B_abs_sqrt(p, x)) / p.h


def equatorial_angle(p, R: VectorLike) -> float:
    """``(1/h) arccosh(L / sqrt|B|)``, the angle to the spatial hyperplane."""
    p = _coerce_params(p)
    x = as_components(R)
    sb = _B_abs_sqrt(p, x)
    if sb == 0.0:
        raise SingularityError("equatorial angle: B vanishes (isotropic vector)")
    m = math.sqrt(float(np.dot(x[1:], x[1:])))
    ratio = (m - 0.5 * p.g * x[0]) / sb
    if ratio < 1.0 - 1e-12:
        raise DomainError(f"equatorial angle: L/sqrt|B| = {ratio!r} < 1")
    return math.acosh(max(ratio, 1.0)) / p.h


@dataclass(frozen=True, eq=False)
class GeodesicCurve:
    """Closed-form geodesic from ``R1`` (s = 0) to ``R2`` (s = delta_s).

    ``a = F1`` and ``b`` are the constants of the quadratic law
    ``F(R(s))**2 = a**2 + 2 b s + s**2``.  ``b`` is negative when the chord
    heads towards smaller F.
    """

    params: CouplingParams
    R1: EventVector
    R2: EventVector
    F1: float
    F2: float
    alpha: float
    delta_s: float
    a: float
    b: float
    A1: float
    A2: float
    B1: float
    B2: float
    l1: np.ndarray
    l2: np.ndarray
    t1: np.ndarray
    t2: np.ndarray


@dataclass(frozen=True)
class GeodesicSample:
    s: float
    point: EventVector
    velocity: EventVector
    fmf: float


def connect(p, R1: VectorLike, R2: VectorLike) -> GeodesicCurve:
    p = _coerce_params(p)
    x1 = require_future_timelike(p, R1, "R1")
    x2 = require_future_timelike(p, R2, "R2")
    l1, l2 = _image_unit(p, x1), _image_unit(p, x2)
    alpha = _hyperbolic_angle(l1, l2) / p.h
    F1, F2 = fmf_F(p, x1), fmf_F(p, x2)
    d2 = _chord_squared(F1, F2, alpha)
    if abs(d2) <= _RADICAND_TOL * F1 * F2:
        raise DegenerateCurveError("endpoints coincide or are joined by a null chord (delta_s = 0)")
    if d2 < 0.0:
        raise DomainError(
            f"distance radicand {d2:.6g} < 0: endpoints are not joined by a timelike chord"
        )
    ds = math.sqrt(d2)
    b = F1 * (F2 * math.cosh(alpha) - F1) / ds
    if b * b - F1 * F1 < -1e-12 * F1 * F1:
        raise PreconditionError("integration constants violate b^2 - a^2 >= 0")
    t = kernels.sigma(p.g, np.vstack([x1, x2]))
    return GeodesicCurve(
        params=p,
        R1=EventVector.from_array(x1),
        R2=EventVector.from_array(x2),
        F1=F1,
        F2=F2,
        alpha=alpha,
        delta_s=ds,
        a=F1,
        b=b,
        A1=float(x1[0] - 0.5 * p.g * np.linalg.norm(x1[1:])),
        A2=float(x2[0] - 0.5 * p.g * np.linalg.norm(x2[1:])),
        B1=-_B_abs_sqrt(p, x1) ** 2,
        B2=-_B_abs_sqrt(p, x2) ** 2,
        l1=l1,
        l2=l2,
        t1=t[0],
        t2=t[1],
    )


def _check_s(curve: GeodesicCurve, s: float, extrapolate: bool) -> float:
    s = float(s)
    if not extrapolate:
        tol = _BOUNDS_TOL * max(curve.delta_s, 1.0)
        if s < -tol or s > curve.delta_s + tol:
            raise DomainError(
                f"s = {s!r} outside [0, delta_s = {curve.delta_s!r}]; pass extrapolate=True to continue the curve"
            )
    return s


def _running_angle(curve: GeodesicCurve, s: float) -> float:
    """Intermediate angle nu(s); 0 at s = 0 and alpha at s = delta_s."""
    sa, ca = math.sinh(curve.alpha), math.cosh(curve.alpha)
    num = s * curve.F2 * sa
    den = curve.F1 * curve.delta_s + (curve.F2 * ca - curve.F1) * s
    if den - abs(num) <= 0.0:
        raise SingularityError("running angle diverges: the chord leaves the future cone")
    x = num / den
    if abs(x) > 0.5:
        return 0.5 * math.log((den + num) / (den - num))
    return math.atanh(x)


def _weights(curve: GeodesicCurve, s: float, nu: float) -> tuple[float, float]:
    h = curve.params.h
    sh = math.sinh(h * curve.alpha)
    if sh == 0.0:
        # parallel endpoints: the alpha -> 0 limit of the sinh ratios
        den = curve.F1 * curve.delta_s + (curve.F2 - curve.F1) * s
        r = s * curve.F2 / den
        return 1.0 - r, r
    return math.sinh(h * (curve.alpha - nu)) / sh, math.sinh(h * nu) / sh


def _state(curve: GeodesicCurve, s: float, extrapolate: bool):
    s = _check_s(curve, s, extrapolate)
    F2s = curve.a**2 + 2.0 * curve.b * s + s * s
    if F2s <= 0.0:
        raise SingularityError("F(R(s))^2 <= 0: curve continued past the isotropic cone")
    Fs = math.sqrt(F2s)
    nu = _running_angle(curve, s)
    c1, c2 = _weights(curve, s, nu)
    t = Fs * (c1 * curve.l1 + c2 * curve.l2)
    return s, Fs, nu, c1, c2, t


def _image_norm_ratio(p: CouplingParams, t: np.ndarray) -> float:
    """``k(s) = |(t0 - m)/(t0 + m)|^(-G/4)``."""
    m = math.sqrt(float(np.dot(t[1:], t[1:])))
    if t[0] - m <= 0.0:
        raise SingularityError("image point on the quasi-isotropic cone (t0 = |t|)")
    return ((t[0] - m) / (t[0] + m)) ** (-0.25 * p.G)


def eval_point(curve: GeodesicCurve, s: float, extrapolate: bool = False) -> EventVector:
    _, _, _, _, _, t = _state(curve, s, extrapolate)
    _image_norm_ratio(curve.params, t)
    return EventVector.from_array(kernels.mu(curve.params.g, t[None, :])[0])


def image_point(curve: GeodesicCurve, s: float, extrapolate: bool = False) -> np.ndarray:
    """``sigma(R(s))`` assembled directly from the hyperbolic interpolation."""
    return _state(curve, s, extrapolate)[5]


def _sinh_ratio(h: float, alpha: float) -> float:
    """``sinh(alpha) / sinh(h alpha)`` with its limit ``1/h`` at 0."""
    if alpha == 0.0:
        return 1.0 / h
    return math.sinh(alpha) / math.sinh(h * alpha)


def eval_velocity(curve: GeodesicCurve, s: float, extrapolate: bool = False) -> EventVector:
    """Unit tangent ``dR/ds`` in closed form.

    Radial part ``(b + s) R / F_s^2`` plus a transverse part.  The spatial
    transverse components carry ``-(g/2) A_i R^a(s) / (h^2 |R(s)|)``; that
    sign is fixed by matching finite differences of ``eval_point``.
    """
    p = curve.params
    h = p.h
    s, Fs, nu, _, _, t = _state(curve, s, extrapolate)
    k = _image_norm_ratio(p, t)
    R = kernels.mu(p.g, t[None, :])[0]
    q = math.sqrt(float(np.dot(R[1:], R[1:])))
    if q == 0.0 and p.g != 0.0:
        raise SingularityError("velocity closed form is singular where the curve meets the time axis")
    sb1, sb2 = math.sqrt(-curve.B1), math.sqrt(-curve.B2)
    c1 = math.cosh(h * (curve.alpha - nu))
    c2 = math.cosh(h * nu)
    T = np.empty_like(R)
    T[0] = (curve.A2 / sb2 * c2 - curve.A1 / sb1 * c1) / h**2
    rad = R[1:] / q if q > 0 else np.zeros_like(R[1:])
    x1, x2 = curve.R1.components, curve.R2.components
    T[1:] = (x2[1:] - 0.5 * p.g * curve.A2 / h**2 * rad) * c2 / sb2 - (
        x1[1:] - 0.5 * p.g * curve.A1 / h**2 * rad
    ) * c1 / sb1
    coef = h * curve.F1 * curve.F2 * _sinh_ratio(h, curve.alpha) / (k * Fs * curve.delta_s)
    return EventVector.from_array((curve.b + s) / Fs**2 * R + coef * T)


def eval_velocity_jacobian(curve: GeodesicCurve, s: float, extrapolate: bool = False) -> EventVector:
    """Tangent via the inverse-map Jacobian applied to ``dt/ds``."""
    p = curve.params
    h = p.h
    s, Fs, nu, _, _, t = _state(curve, s, extrapolate)
    _image_norm_ratio(p, t)
    dl = math.cosh(h * nu) * curve.l2 - math.cosh(h * (curve.alpha - nu)) * curve.l1
    coef = h * curve.F1 * curve.F2 * _sinh_ratio(h, curve.alpha) / (curve.delta_s * Fs)
    dt = (curve.b + s) / Fs**2 * t + coef * dl
    M = kernels.mu_jacobian(p.g, t[None, :])[0]
    return EventVector.from_array(M @ dt)


def span_coefficients(curve: GeodesicCurve, s: float, extrapolate: bool = False) -> tuple[float, float]:
    """Coefficients of ``R1`` and ``R2`` in the span decomposition of ``R(s)``."""
    p = curve.params
    _, Fs, _, c1, c2, t = _state(curve, s, extrapolate)
    k = _image_norm_ratio(p, t)
    return Fs * c1 / (k * math.sqrt(-curve.B1)), Fs * c2 / (k * math.sqrt(-curve.B2))


def nonplanarity(curve: GeodesicCurve, s: float, extrapolate: bool = False) -> float:
    """Time-axis component X(s) left over after projecting R(s) on span(R1, R2)."""
    p = curve.params
    _, Fs, _, c1, c2, t = _state(curve, s, extrapolate)
    k = _image_norm_ratio(p, t)
    m = math.sqrt(float(np.dot(t[1:], t[1:])))
    q1 = float(np.linalg.norm(curve.R1.components[1:]))
    q2 = float(np.linalg.norm(curve.R2.components[1:]))
    inner = c1 * q1 / math.sqrt(-curve.B1) + c2 * q2 / math.sqrt(-curve.B2) - m / (p.h * Fs)
    return -0.5 * p.g * Fs / k * inner


def sample(curve: GeodesicCurve, count: int) -> list[GeodesicSample]:
    """``count`` evenly spaced samples on ``[0, delta_s]`` (endpoints included)."""
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 1:
        grid = np.array([0.0])
    else:
        grid = np.linspace(0.0, curve.delta_s, count)
    out = []
    for s in grid:
        R = eval_point(curve, s)
        out.append(GeodesicSample(float(s), R, eval_velocity(curve, s), fmf_F(curve.params, R)))
    return out


def shoot(p, R1: VectorLike, U1: VectorLike, delta_s: float) -> EventVector:
    """Endpoint reached from ``R1`` with unit initial velocity ``U1`` after arclength ``delta_s``."""
    p = _coerce_params(p)
    x1 = require_future_timelike(p, R1, "R1")
    u1 = as_components(U1)
    if u1.size != x1.size:
        raise PreconditionError("initial velocity and R1 differ in dimension")
    ds = float(delta_s)
    if not ds >= 0.0:
        raise PreconditionError(f"arclength must be non-negative, got {delta_s!r}")
    g1 = metric_tensor(p, x1)
    norm2 = g1.norm_squared(u1)
    if abs(norm2 - 1.0) > UNIT_VELOCITY_TOL:
        raise PreconditionError(f"initial velocity must be unit, g(U1, U1) = {norm2!r}")
    F1 = fmf_F(p, x1)
    b = float((g1.components @ x1) @ u1)
    F2sq = F1 * F1 + 2.0 * b * ds + ds * ds
    if F2sq <= 0.0:
        raise DomainError("F(R2)^2 = F1^2 + 2 b ds + ds^2 must be positive")
    F2 = math.sqrt(F2sq)
    if F1 * F1 + b * ds <= 0.0:
        raise DomainError("angle arccosh argument (F1^2 + b ds)/(F1 F2) is below 1: chord leaves the future cone")
    # sinh(alpha) = ds sqrt(b^2 - a^2) / (F1 F2), equivalent to the arccosh form
    alpha = math.asinh(ds * math.sqrt(max(b * b - F1 * F1, 0.0)) / (F1 * F2))
    h = p.h
    rho = 1.0 / (h * _sinh_ratio(h, alpha))
    z = rho + F2 / F1 * (math.cosh(h * alpha) - rho * math.cosh(alpha))
    n = rho * ds
    t1 = kernels.sigma(p.g, x1[None, :])[0]
    J = kernels.sigma_jacobian(p.g, x1[None, :])[0]
    t2 = z * t1 + n * (J @ u1)
    m2 = math.sqrt(float(np.dot(t2[1:], t2[1:])))
    if t2[0] <= m2:
        raise DomainError("shot endpoint leaves the future quasi-cone")
    return EventVector.from_array(kernels.mu(p.g, t2[None, :])[0])


def geodesic_residual(p, curve: GeodesicCurve, s: float, step: float = 1e-3) -> float:
    """Scale-relative residual of the geodesic equation at ``s``.

    Acceleration by central differences of ``eval_point`` (one Richardson
    level), spray term from the finite-difference Cartan tensor.  Normalised
    by ``|U|^2 / F``, the natural size of either term.
    """
    p = _coerce_params(p)
    s = _check_s(curve, s, False)
    U = eval_velocity(curve, s).components
    R = eval_point(curve, s).components
    Fs = fmf_F(p, R)
    e = step * min(Fs, curve.delta_s) / max(float(np.max(np.abs(U))), 1.0)

    def second(e):
        plus = eval_point(curve, s + e, extrapolate=True).components
        minus = eval_point(curve, s - e, extrapolate=True).components
        return (plus - 2.0 * R + minus) / (e * e)

    acc = (4.0 * second(e) - second(2.0 * e)) / 3.0
    ct = cartan_tensor(p, R)
    spray = ct.metric.inverse @ np.einsum("qtr,q,r->t", ct.components, U, U)
    scale = float(np.max(np.abs(U))) ** 2 / Fs
    return float(np.max(np.abs(acc + spray)) / scale)


def arclength(curve: GeodesicCurve, nodes: int = 24) -> float:
    """Gauss-Legendre quadrature of ``sqrt(g(U, U))`` over ``[0, delta_s]``."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * curve.delta_s
    total = 0.0
    for xi, wi in zip(x, w):
        s = half * (xi + 1.0)
        U = eval_velocity(curve, s).components
        g = metric_tensor(curve.params, eval_point(curve, s))
        total += wi * math.sqrt(g.norm_squared(U))
    return half * total
