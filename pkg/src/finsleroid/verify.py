"""Finite-difference oracles and the randomized identity suite."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from . import cospace, geodesics, kernels, metric, transform
from ._fd import central_first_batch, hessian_batch
from .errors import AccuracyError, FinsleroidError
from .params import (
    DEFAULT_DIM,
    CouplingParams,
    EventVector,
    _coerce_params,
    as_components,
    derive_params,
)

CONE_MARGIN = 0.05
AXIS_MARGIN = 1e-3
LIMIT_G = 1e-8
LIMIT_AXIS_MARGIN = 0.05
CURVE_SAMPLES = 100
VELOCITY_SAMPLES = 10

DEFAULT_TOLERANCES = {
    "metric_determinant": 1e-9,
    "metric_signature": 0.5,
    "cartan_form": 1e-3,
    "cartan_contraction": 1e-4,
    "curvature_scalar": 1e-3,
    "sigma_mu_roundtrip": 1e-12,
    "isometry": 1e-12,
    "sigma_euler": 1e-10,
    "sigma_jacobian_det": 1e-9,
    "mu_euler": 1e-10,
    "n_tensor_inverse": 1e-10,
    "n_tensor_det": 1e-12,
    "n_tensor_contractions": 1e-10,
    "christoffel_contractions": 1e-10,
    "fmf_quadratic_law": 1e-9,
    "scalar_product_reduction": 1e-12,
    "distance_symmetry": 1e-12,
    "co_distance_symmetry": 1e-12,
    "velocity_contraction": 1e-8,
    "velocity_unit_norm": 1e-8,
    "endpoint_interpolation": 1e-9,
    "shoot_connect_roundtrip": 1e-7,
    "legendre_residual": 1e-8,
    "pseudoeuclidean_limit": 1e-6,
}

IDENTITY_REFS = {
    "metric_determinant": "det g_pq = (-1)^(N-1) j^(2N)",
    "metric_signature": "sign g_pq = (+ - ... -)",
    "cartan_form": "C_pqr = (h_pq C_r + h_pr C_q + h_qr C_p - C_p C_q C_r / C_t C^t) / N",
    "cartan_contraction": "C_t C^t = -N^2 g^2 / (4 F^2)",
    "curvature_scalar": "S_pqrs = S* (h_pr h_qs - h_ps h_qr) / F^2 with S* = g^2/4",
    "sigma_mu_roundtrip": "mu(sigma(R)) = R and sigma(mu(t)) = t",
    "isometry": "F(R) = S(sigma(R))",
    "sigma_euler": "t^i_p R^p = t^i",
    "sigma_jacobian_det": "det t^i_p = j^N h^(N-1)",
    "mu_euler": "mu^p_i t^i = R^p",
    "n_tensor_inverse": "n_ij n^jk = delta_i^k",
    "n_tensor_det": "det n^ij = (-1)^(N-1) h^(2N-2) = 1 / det n_ij",
    "n_tensor_contractions": "l^i l_i = n_ij l^i l^j = 1; n_ij l^j = l_i; n^ij l_j = l^i; n_ij t^i t^j = S^2",
    "christoffel_contractions": "t^i N_i^m_j = 0; N_i^j_j = 0; L^i H_ij = 0",
    "fmf_quadratic_law": "F(R(s))^2 = a^2 + 2 b s + s^2",
    "scalar_product_reduction": "<R, R> = F(R)^2",
    "distance_symmetry": "|R1 - R2| = |R2 - R1|",
    "co_distance_symmetry": "|P1 - P2| = |P2 - P1|",
    "velocity_contraction": "R_p(s) U^p(s) = b + s",
    "velocity_unit_norm": "g_pq(R(s)) U^p U^q = 1",
    "endpoint_interpolation": "R(0) = R1 and R(delta_s) = R2",
    "shoot_connect_roundtrip": "connect(R1, shoot(R1, U1, ds)) has initial velocity U1 and length ds",
    "legendre_residual": "H(g; dF^2/2) = F",
    "pseudoeuclidean_limit": "g -> 0 reduces F, H, sigma, g_pq, C_pqr and angles to pseudoeuclidean forms",
}

TOLERANCE_ALIASES = {
    "cartan": ("cartan_form", "cartan_contraction"),
    "curvature": ("curvature_scalar",),
    "geodesic": ("fmf_quadratic_law", "velocity_contraction", "velocity_unit_norm", "endpoint_interpolation"),
}


@dataclass(frozen=True)
class FDConfig:
    """Steps are relative to ``metric.derivative_scale`` at each point."""

    base_step: float = 1e-5
    hessian_step: float = 1e-3
    cartan_step: float = 1e-4
    richardson_levels: int = 1
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        for name in ("base_step", "hessian_step", "cartan_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.richardson_levels < 0:
            raise ValueError("richardson_levels must be >= 0")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ValueError(f"tolerance for {k} must be positive")

    def with_tolerances(self, overrides: dict) -> "FDConfig":
        tols = dict(self.tolerances)
        for key, value in overrides.items():
            names = TOLERANCE_ALIASES.get(key, (key,))
            for name in names:
                if name not in DEFAULT_TOLERANCES:
                    raise KeyError(f"unknown identity {key!r}")
                tols[name] = float(value)
        return replace(self, tolerances=tols)


def _batch(f: Callable, vectorized: bool) -> Callable:
    if vectorized:
        return f
    return lambda X: np.array([f(row) for row in X])


def fd_gradient(f: Callable, x, cfg: FDConfig | None = None, scale: float = 1.0, vectorized: bool = False):
    """Gradient of a scalar field. Returns ``(gradient, error_estimate)``."""
    cfg = cfg or FDConfig()
    return central_first_batch(_batch(f, vectorized), as_components(x), cfg.base_step * scale, cfg.richardson_levels)


def fd_hessian(f: Callable, x, cfg: FDConfig | None = None, scale: float = 1.0, vectorized: bool = False):
    cfg = cfg or FDConfig()
    return hessian_batch(_batch(f, vectorized), as_components(x), cfg.hessian_step * scale, cfg.richardson_levels)


def fd_third(f: Callable, x, cfg: FDConfig | None = None, scale: float = 1.0, vectorized: bool = False):
    """Third derivatives, as first differences of the difference Hessian."""
    cfg = cfg or FDConfig()
    inner = _batch(f, vectorized)
    x = as_components(x)
    h_step = cfg.hessian_step * scale

    def hess_batch(X):
        return np.array([hessian_batch(inner, row, h_step, cfg.richardson_levels)[0] for row in X])

    return central_first_batch(hess_batch, x, 10.0 * h_step, cfg.richardson_levels)


def fmf_squared_oracle(p: CouplingParams) -> Callable:
    """Vectorised ``F**2`` straight from the factorised closed form."""
    return lambda X: kernels.fmf(p.g, X) ** 2


def hessian_oracle_error(p, R, cfg: FDConfig | None = None) -> float:
    """Max entry of ``metric_tensor - Hessian(F^2)/2`` relative to the largest metric entry."""
    p = _coerce_params(p)
    cfg = cfg or FDConfig()
    x = as_components(R)
    H, _ = fd_hessian(fmf_squared_oracle(p), x, cfg, scale=metric.derivative_scale(p, x), vectorized=True)
    g = metric.metric_tensor(p, x).components
    return float(np.max(np.abs(g - 0.5 * H)) / np.max(np.abs(g)))


def sample_timelike(
    p,
    count: int,
    seed: int,
    margin: float = CONE_MARGIN,
    axis_margin: float = AXIS_MARGIN,
    dim: int = DEFAULT_DIM,
) -> list[EventVector]:
    """Reproducible future-timelike points away from the cone and the axis.

    The ratio ``g_sup_plus |R| / R0`` is uniform on ``[0, 1/(1+margin)]`` and
    the overall scale log-uniform on ``[1/e, e]``; points with
    ``|R| < axis_margin * F`` are rejected.
    """
    p = _coerce_params(p)
    if not 0 < margin < 1:
        raise ValueError("margin must lie in (0, 1)")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    out: list[EventVector] = []
    while len(out) < count:
        n = rng.normal(size=dim)
        n /= np.linalg.norm(n)
        ratio = rng.uniform(0.0, 1.0 / (1.0 + margin))
        r0 = math.exp(rng.uniform(-1.0, 1.0))
        m = ratio * r0 / p.g_sup_plus
        x = np.concatenate([[r0], m * n])
        if m < axis_margin * metric.fmf_F(p, x):
            continue
        out.append(EventVector.from_array(x))
    return out


def sample_pairs(p, count: int, seed: int, dim: int = DEFAULT_DIM, min_chord: float = 1e-2):
    """Pairs of sampled points joined by a timelike chord of relative length >= ``min_chord``."""
    p = _coerce_params(p)
    out = []
    stream = 0
    while len(out) < count:
        pts = sample_timelike(p, 2 * max(count, 8), seed=(seed, stream), dim=dim)
        stream += 1
        for a, b in zip(pts[::2], pts[1::2]):
            F1, F2 = metric.fmf_F(p, a), metric.fmf_F(p, b)
            alpha = geodesics.angle(p, a, b)
            d2 = geodesics._chord_squared(F1, F2, alpha)
            if d2 > (min_chord**2) * F1 * F2:
                out.append((a, b))
                if len(out) == count:
                    break
        if stream > 1000:
            raise RuntimeError("could not draw enough joinable pairs")
    return out


def sample_initial_data(p, count: int, seed: int, dim: int = DEFAULT_DIM):
    """Triples ``(R1, U1, ds)`` with unit future-pointing ``U1`` whose shot endpoint stays well inside the cone."""
    p = _coerce_params(p)
    rng = np.random.default_rng((seed, 7))
    base = iter(sample_timelike(p, 50 * count + 50, seed=(seed, 11), dim=dim))
    out = []
    for R1 in base:
        if len(out) == count:
            break
        x = R1.components
        F1 = metric.fmf_F(p, x)
        g1 = metric.metric_tensor(p, x)
        W = x / F1 + 0.6 * rng.normal(size=x.size)
        nw = g1.norm_squared(W)
        if nw <= 0.05 * float(W @ W) or float(g1.lower(x) @ W) <= 0:
            continue
        U = W / math.sqrt(nw)
        ds = F1 * rng.uniform(0.05, 1.5)
        try:
            R2 = geodesics.shoot(p, x, U, ds)
        except FinsleroidError:
            continue
        y = R2.components
        m2 = float(np.linalg.norm(y[1:]))
        if y[0] < (1.0 + CONE_MARGIN) * p.g_sup_plus * m2 or m2 < AXIS_MARGIN * metric.fmf_F(p, y):
            continue
        out.append((R1, U, ds))
    if len(out) < count:
        raise RuntimeError("could not draw enough initial-data triples")
    return out


@dataclass(frozen=True)
class IdentityRecord:
    name: str
    ref: str
    points_tested: int
    max_relative_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_relative_error <= self.tolerance)


@dataclass(frozen=True)
class SuiteReport:
    records: tuple
    seed: int
    g_values: tuple
    count: int
    dim: int = DEFAULT_DIM

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def record(self, name: str) -> IdentityRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def failures(self) -> list[IdentityRecord]:
        return [r for r in self.records if not r.passed]

    def to_lines(self, fmt: str = "csv") -> list[str]:
        return format_report(self, fmt)


def _rel(err: float, denom: float) -> float:
    return float(abs(err) / max(abs(denom), 1e-300))


class _Acc:
    """Running max per identity; reduction is order independent."""

    def __init__(self):
        self.err = {k: 0.0 for k in DEFAULT_TOLERANCES}
        self.n = {k: 0 for k in DEFAULT_TOLERANCES}

    def add(self, name: str, err: float, n: int = 1) -> None:
        err = float(err)
        if not math.isfinite(err):
            err = math.inf
        self.err[name] = max(self.err[name], err)
        self.n[name] += n


class _SkipCartan(Exception):
    """The reducible-form and curvature identities need N >= 3."""


def _point_identities(acc: _Acc, p: CouplingParams, x: np.ndarray, cfg: FDConfig) -> None:
    N = x.size
    eta = np.ones(N)
    eta[1:] = -1.0
    F = metric.fmf_F(p, x)
    j = metric.weight_j(p, x)

    gt = metric.metric_tensor(p, x)
    sgn = (-1.0) ** (N - 1)
    acc.add("metric_determinant", _rel(gt.det - sgn * j ** (2 * N), j ** (2 * N)))
    acc.add("metric_signature", 0.0 if gt.signature() == (1, N - 1) else 1.0)

    try:
        if N < 3:
            raise _SkipCartan
        ct = metric.cartan_tensor(p, x, step=cfg.cartan_step, levels=cfg.richardson_levels)
        expected = -(N**2) * p.g**2 / 4.0
        acc.add("cartan_form", ct.form_residual())
        acc.add("cartan_contraction", _rel(ct.norm_squared() * F * F - expected, expected if expected else 1.0))
        s_star, resid = metric.curvature_fit(p, x, ct)
        acc.add("curvature_scalar", max(abs(s_star - p.g**2 / 4.0), resid))
    except _SkipCartan:
        pass
    except AccuracyError:
        for k in ("cartan_form", "cartan_contraction", "curvature_scalar"):
            acc.add(k, math.inf)

    t = kernels.sigma(p.g, x[None, :])[0]
    back = kernels.mu(p.g, t[None, :])[0]
    # second direction starts from an image point that is not an exact sigma output
    t_alt = t * (1.0 + 1e-3 * eta)
    if t_alt[0] > np.linalg.norm(t_alt[1:]):
        t_back = kernels.sigma(p.g, kernels.mu(p.g, t_alt[None, :]))[0]
        e2 = _rel(np.max(np.abs(t_back - t_alt)), np.max(np.abs(t_alt)))
    else:
        e2 = 0.0
    acc.add("sigma_mu_roundtrip", max(_rel(np.max(np.abs(back - x)), np.max(np.abs(x))), e2))
    acc.add("isometry", _rel(transform.s_norm(t) - F, F))

    jp = transform.sigma_jacobian(p, x)
    acc.add("sigma_euler", _rel(np.max(np.abs(jp.forward @ x - t)), np.max(np.abs(t))))
    jd = j**N * p.h ** (N - 1)
    acc.add("sigma_jacobian_det", _rel(jp.det - jd, jd))
    acc.add("mu_euler", _rel(np.max(np.abs(jp.backward @ t - x)), np.max(np.abs(x))))

    n_low, n_up = transform.n_tensor(p, t)
    acc.add("n_tensor_inverse", np.max(np.abs(n_low @ n_up - np.eye(N))))
    acc.add(
        "n_tensor_det",
        max(
            _rel(np.linalg.det(n_up) - sgn * p.h ** (2 * N - 2), p.h ** (2 * N - 2)),
            _rel(np.linalg.det(n_low) - sgn * p.h ** (2 - 2 * N), p.h ** (2 - 2 * N)),
        ),
    )
    S = transform.s_norm(t)
    lu = t / S
    ll = eta * lu
    contr = max(
        abs(lu @ ll - 1.0),
        abs(lu @ n_low @ lu - 1.0),
        np.max(np.abs(n_low @ lu - ll)),
        np.max(np.abs(n_up @ ll - lu)),
        abs(t @ n_low @ t - S * S) / (S * S),
    )
    acc.add("n_tensor_contractions", contr)

    gam = transform.christoffel(p, t)
    H = transform.transverse_projector(t)
    gscale = max(float(np.max(np.abs(gam))), 1e-300)
    c1 = np.max(np.abs(np.einsum("i,mij->mj", t, gam))) / (gscale * np.max(np.abs(t)))
    c2 = np.max(np.abs(np.einsum("jij->i", gam))) / gscale
    c3 = np.max(np.abs(lu @ H))
    acc.add("christoffel_contractions", 0.0 if p.g == 0.0 else max(c1, c2, c3))

    acc.add("scalar_product_reduction", _rel(geodesics.scalar_product(p, x, x) - F * F, F * F))
    acc.add("legendre_residual", cospace.legendre_duality_check(p, x))


def _curve_identities(acc: _Acc, p: CouplingParams, R1: EventVector, R2: EventVector) -> None:
    curve = geodesics.connect(p, R1, R2)
    x1, x2 = R1.components, R2.components
    scale = max(np.max(np.abs(x1)), np.max(np.abs(x2)))
    e0 = np.max(np.abs(geodesics.eval_point(curve, 0.0).components - x1))
    e1 = np.max(np.abs(geodesics.eval_point(curve, curve.delta_s).components - x2))
    acc.add("endpoint_interpolation", max(e0, e1) / scale)

    worst = 0.0
    for s in np.linspace(0.0, curve.delta_s, CURVE_SAMPLES):
        law = curve.a**2 + 2.0 * curve.b * s + s * s
        Fs = metric.fmf_F(p, geodesics.eval_point(curve, s))
        worst = max(worst, abs(Fs * Fs - law) / law)
    acc.add("fmf_quadratic_law", worst, CURVE_SAMPLES)

    wc = wn = 0.0
    for s in np.linspace(0.0, curve.delta_s, VELOCITY_SAMPLES):
        R = geodesics.eval_point(curve, s).components
        U = geodesics.eval_velocity(curve, s).components
        gt = metric.metric_tensor(p, R)
        Fs = metric.fmf_F(p, R)
        wc = max(wc, abs(gt.lower(R) @ U - (curve.b + s)) / max(abs(curve.b + s), Fs))
        wn = max(wn, abs(gt.norm_squared(U) - 1.0))
    acc.add("velocity_contraction", wc, VELOCITY_SAMPLES)
    acc.add("velocity_unit_norm", wn, VELOCITY_SAMPLES)

    d12 = geodesics.distance(p, x1, x2)
    d21 = geodesics.distance(p, x2, x1)
    acc.add("distance_symmetry", _rel(d12 - d21, max(d12, 1e-300)))


def _shoot_identity(acc: _Acc, p: CouplingParams, R1: EventVector, U1: np.ndarray, ds: float) -> None:
    R2 = geodesics.shoot(p, R1, U1, ds)
    curve = geodesics.connect(p, R1, R2)
    U0 = geodesics.eval_velocity(curve, 0.0).components
    ev = np.max(np.abs(U0 - U1)) / np.max(np.abs(U1))
    eds = abs(curve.delta_s - ds) / ds
    acc.add("shoot_connect_roundtrip", max(ev, eds))


def _co_identity(acc: _Acc, p: CouplingParams, P1, P2) -> None:
    try:
        a = cospace.co_distance(p, P1, P2)
        b = cospace.co_distance(p, P2, P1)
    except FinsleroidError:
        return
    acc.add("co_distance_symmetry", _rel(a - b, max(a, 1e-300)))


def _limit_identities(acc: _Acc, count: int, seed: int, dim: int) -> None:
    p = derive_params(LIMIT_G)
    pts = sample_timelike(p, count, seed=(seed, 99), axis_margin=LIMIT_AXIS_MARGIN, dim=dim)
    N = dim + 1
    eta = np.diag(np.concatenate([[1.0], -np.ones(dim)]))
    for a, b in zip(pts, pts[1:] + pts[:1]):
        x, y = a.components, b.components
        mink = lambda v: math.sqrt(abs(v[0] ** 2 - v[1:] @ v[1:]))
        F = metric.fmf_F(p, x)
        errs = [
            abs(F - mink(x)) / F,
            abs(cospace.fhf_H(p, x) - mink(x)) / F,
            np.max(np.abs(kernels.sigma(p.g, x[None, :])[0] - x)) / np.max(np.abs(x)),
            np.max(np.abs(metric.metric_tensor(p, x).components - eta)),
            np.max(np.abs(metric.cartan_tensor(p, x).components)) * F,
        ]
        arg = (x[0] * y[0] - x[1:] @ y[1:]) / (mink(x) * mink(y))
        rap = math.acosh(max(arg, 1.0))
        errs.append(abs(geodesics.angle(p, x, y) - rap) / max(rap, 1.0))
        errs.append(abs(cospace.co_angle(p, x, y) - rap) / max(rap, 1.0))
        acc.add("pseudoeuclidean_limit", max(errs))


def run_suite(
    g_values: Iterable[float],
    count: int,
    seed: int,
    cfg: FDConfig | None = None,
    dim: int = DEFAULT_DIM,
) -> SuiteReport:
    """Evaluate every identity at ``count`` random inputs per coupling value.

    Failures are recorded, never raised.  The identity set is fixed
    (``DEFAULT_TOLERANCES``); a domain error inside an identity counts as an
    infinite error for it.
    """
    cfg = cfg or FDConfig()
    g_values = tuple(float(g) for g in g_values)
    acc = _Acc()
    for gi, g in enumerate(g_values):
        p = derive_params(g)
        stream = (seed, gi)
        for R in sample_timelike(p, count, seed=stream, dim=dim):
            _guard(acc, _point_identities, p, R.components, cfg)
        for R1, R2 in sample_pairs(p, count, seed=(seed, gi, 1), dim=dim):
            _guard(acc, _curve_identities, p, R1, R2)
        for R1, U1, ds in sample_initial_data(p, count, seed=seed * 1000 + gi, dim=dim):
            _guard(acc, _shoot_identity, p, R1, U1, ds)
        # covector samples: co-cone slopes at g are the cone slopes at -g
        co = sample_timelike(derive_params(-g), 2 * count, seed=(seed, gi, 2), dim=dim)
        for P1, P2 in zip(co[::2], co[1::2]):
            _co_identity(acc, p, P1, P2)
    _guard(acc, _limit_identities, count, seed, dim)
    records = tuple(
        IdentityRecord(name, IDENTITY_REFS[name], acc.n[name], acc.err[name], cfg.tolerances[name])
        for name in DEFAULT_TOLERANCES
    )
    return SuiteReport(records, seed, g_values, count, dim)


def _guard(acc: _Acc, fn, *args) -> None:
    try:
        fn(acc, *args)
    except FinsleroidError:
        acc.add(_identity_for(fn), math.inf)


def _identity_for(fn) -> str:
    return {
        _point_identities: "metric_determinant",
        _curve_identities: "endpoint_interpolation",
        _shoot_identity: "shoot_connect_roundtrip",
        _limit_identities: "pseudoeuclidean_limit",
    }.get(fn, "metric_determinant")


def _fmt_float(x: float) -> str:
    return repr(float(x))


REPORT_FIELDS = ("name", "ref", "n", "max_err", "tol", "pass")


def format_report(report: SuiteReport, fmt: str = "csv") -> list[str]:
    """One line per identity, in a stable order."""
    rows = [
        (r.name, r.ref, r.points_tested, r.max_relative_error, r.tolerance, r.passed) for r in report.records
    ]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for name, ref, n, err, tol, ok in rows:
            w.writerow([name, ref, n, _fmt_float(err), _fmt_float(tol), "true" if ok else "false"])
        return buf.getvalue().splitlines()
    if fmt in ("jsonl", "json-lines"):
        return [
            json.dumps(dict(zip(REPORT_FIELDS, (name, ref, n, err, tol, ok))), allow_nan=True)
            for name, ref, n, err, tol, ok in rows
        ]
    raise ValueError(f"unknown report format {fmt!r}")
