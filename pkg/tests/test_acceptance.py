"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary (and immediately when run with ``-s``).
"""
import math
import subprocess
import sys

import numpy as np

from finsleroid import (
    angle,
    arclength,
    cartan_tensor,
    co_angle,
    connect,
    derive_params,
    eval_point,
    eval_velocity,
    fhf_H,
    fmf_F,
    geodesic_residual,
    legendre_duality_check,
    metric_tensor,
    shoot,
    weight_j,
)
from finsleroid import kernels, transform
from finsleroid.metric import curvature_fit, implied_indicatrix_curvature
from finsleroid.verify import hessian_oracle_error, sample_initial_data, sample_pairs, sample_timelike

SEED = 20240601
G_SET = (0.0, 0.2, -0.2, 0.8, -0.8, 1.5, -1.5)
G_NONZERO = tuple(g for g in G_SET if g)


class Criterion:
    def __init__(self, log, number, title):
        self.log, self.number, self.title = log, number, title
        self.checks = []

    def check(self, name, err, tol):
        err = float(err)
        self.checks.append((name, err, tol, bool(err <= tol)))

    def flag(self, name, ok):
        self.checks.append((name, 0.0 if ok else 1.0, 0.5, bool(ok)))

    def finish(self):
        ok = all(c[3] for c in self.checks)
        bad = [f"{n} {e:.3g} > {t:g}" for n, e, t, good in self.checks if not good]
        worst = ", ".join(f"{n}={e:.2g}" for n, e, _, _ in self.checks)
        line = f"criterion {self.number:2d} {'PASS' if ok else 'FAIL'}  {self.title}  [{worst}]"
        if bad:
            line += "  failing: " + "; ".join(bad)
        self.log.append(line)
        print(line)
        assert ok, line


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_determinant(acceptance_log):
    c = Criterion(acceptance_log, 1, "det g = -j^8 at 100 points per g")
    for g in G_SET:
        worst = max(
            _rel(metric_tensor(g, R).det, -weight_j(g, R) ** 8) for R in sample_timelike(g, 100, seed=(SEED, 1))
        )
        c.check(f"g={g}", worst, 1e-9)
    c.finish()


def test_criterion_02_signature(acceptance_log):
    c = Criterion(acceptance_log, 2, "exactly one positive eigenvalue (d=3)")
    for g in G_SET:
        sigs = {metric_tensor(g, R).signature() for R in sample_timelike(g, 100, seed=(SEED, 1))}
        c.flag(f"g={g}", sigs == {(1, 3)})
    c.finish()


def test_criterion_03_hessian_oracle(acceptance_log):
    c = Criterion(acceptance_log, 3, "metric equals half the FD Hessian of F^2")
    for g in G_SET:
        c.check(f"g={g}", max(hessian_oracle_error(g, R) for R in sample_timelike(g, 20, seed=(SEED, 3))), 1e-6)
    c.finish()


def test_criterion_04_cartan(acceptance_log):
    c = Criterion(acceptance_log, 4, "Cartan reducible form, C_t C^t F^2 = -4 g^2, C = 0 at g = 0")
    for g in G_NONZERO:
        form = contr = 0.0
        for R in sample_timelike(g, 20, seed=(SEED, 4)):
            ct = cartan_tensor(g, R)
            form = max(form, ct.form_residual())
            contr = max(contr, _rel(ct.norm_squared() * fmf_F(g, R) ** 2, -4 * g * g))
        c.check(f"form g={g}", form, 1e-3)
        c.check(f"contraction g={g}", contr, 1e-4)
    zero = max(np.max(np.abs(cartan_tensor(0.0, R).components)) for R in sample_timelike(0.0, 20, seed=(SEED, 4)))
    c.check("C at g=0", zero, 0.0)
    c.finish()


def test_criterion_05_curvature(acceptance_log):
    c = Criterion(acceptance_log, 5, "S* = g^2/4 within 1e-3")
    for g in (0.5, 1.0, 1.5):
        worst = 0.0
        for R in sample_timelike(g, 10, seed=(SEED, 5)):
            s_star, _ = curvature_fit(g, R)
            worst = max(worst, abs(s_star - g * g / 4))
        c.check(f"g={g} (indicatrix curvature {implied_indicatrix_curvature(g * g / 4):g})", worst, 1e-3)
    c.finish()


def test_criterion_06_isometry(acceptance_log):
    c = Criterion(acceptance_log, 6, "quasi-pseudoeuclidean map identities")
    errs = dict.fromkeys(
        ("roundtrip", "isometry", "det_jacobian", "det_n_lower=-h^6", "det_n_upper=-h^6", "euler_sigma", "euler_mu", "n_contractions", "christoffel"),
        0.0,
    )
    for g in G_NONZERO:
        p = derive_params(g)
        for R in sample_timelike(p, 50, seed=(SEED, 6)):
            x = R.components
            t = kernels.sigma(g, x[None])[0]
            back = kernels.mu(g, t[None])[0]
            F = fmf_F(p, x)
            j = weight_j(p, x)
            jp = transform.sigma_jacobian(p, x)
            n_low, n_up = transform.n_tensor(p, t)
            S = transform.s_norm(t)
            lu = t / S
            ll = np.concatenate([[lu[0]], -lu[1:]])
            gam = transform.christoffel(p, t)
            H = transform.transverse_projector(t)
            errs["roundtrip"] = max(errs["roundtrip"], np.max(np.abs(back - x)) / np.max(np.abs(x)))
            errs["isometry"] = max(errs["isometry"], _rel(S, F))
            errs["det_jacobian"] = max(errs["det_jacobian"], _rel(jp.det, j**4 * p.h**3))
            errs["det_n_lower=-h^6"] = max(errs["det_n_lower=-h^6"], _rel(np.linalg.det(n_low), -p.h**6))
            errs["det_n_upper=-h^6"] = max(errs["det_n_upper=-h^6"], _rel(np.linalg.det(n_up), -p.h**6))
            errs["euler_sigma"] = max(errs["euler_sigma"], np.max(np.abs(jp.forward @ x - t)) / np.max(np.abs(t)))
            errs["euler_mu"] = max(errs["euler_mu"], np.max(np.abs(jp.backward @ t - x)) / np.max(np.abs(x)))
            errs["n_contractions"] = max(
                errs["n_contractions"],
                abs(lu @ n_low @ lu - 1),
                np.max(np.abs(n_low @ lu - ll)),
                np.max(np.abs(n_low @ n_up - np.eye(4))),
            )
            gs = np.max(np.abs(gam))
            errs["christoffel"] = max(
                errs["christoffel"],
                np.max(np.abs(np.einsum("i,mij->mj", t, gam))) / (gs * np.max(np.abs(t))),
                np.max(np.abs(np.einsum("jij->i", gam))) / gs,
                np.max(np.abs(lu @ H)),
            )
    tols = {"roundtrip": 1e-12, "isometry": 1e-12, "det_jacobian": 1e-9, "det_n_lower=-h^6": 1e-12, "det_n_upper=-h^6": 1e-12}
    for name, err in errs.items():
        c.check(name, err, tols.get(name, 1e-10))
    c.finish()


def test_criterion_07_geodesics(acceptance_log):
    c = Criterion(acceptance_log, 7, "geodesic suite")
    e = dict.fromkeys(("endpoints", "quadratic_law", "contraction", "unit_norm", "ode_residual", "arclength"), 0.0)
    for g in G_NONZERO:
        for R1, R2 in sample_pairs(g, 10, seed=(SEED, 7)):
            cv = connect(g, R1, R2)
            x1, x2 = R1.components, R2.components
            scale = max(np.max(np.abs(x1)), np.max(np.abs(x2)))
            e["endpoints"] = max(
                e["endpoints"],
                np.max(np.abs(eval_point(cv, 0.0).components - x1)) / scale,
                np.max(np.abs(eval_point(cv, cv.delta_s).components - x2)) / scale,
            )
            for s in np.linspace(0, cv.delta_s, 100):
                law = cv.a**2 + 2 * cv.b * s + s * s
                e["quadratic_law"] = max(e["quadratic_law"], _rel(fmf_F(g, eval_point(cv, s)) ** 2, law))
            for s in np.linspace(0, cv.delta_s, 10):
                R = eval_point(cv, s).components
                U = eval_velocity(cv, s).components
                gt = metric_tensor(g, R)
                e["contraction"] = max(e["contraction"], abs(gt.lower(R) @ U - (cv.b + s)) / max(abs(cv.b + s), fmf_F(g, R)))
                e["unit_norm"] = max(e["unit_norm"], abs(gt.norm_squared(U) - 1))
            for frac in (0.25, 0.5, 0.75):
                e["ode_residual"] = max(e["ode_residual"], geodesic_residual(g, cv, frac * cv.delta_s))
            e["arclength"] = max(e["arclength"], _rel(arclength(cv), cv.delta_s))
    straight = 0.0
    for R1, R2 in sample_pairs(0.0, 20, seed=(SEED, 7)):
        cv = connect(0.0, R1, R2)
        x1, x2 = R1.components, R2.components
        for s in np.linspace(0, cv.delta_s, 11):
            line = x1 + (x2 - x1) * s / cv.delta_s
            straight = max(straight, np.max(np.abs(eval_point(cv, s).components - line)) / np.max(np.abs(x2)))
    tols = dict(endpoints=1e-9, quadratic_law=1e-9, contraction=1e-8, unit_norm=1e-8, ode_residual=1e-4, arclength=1e-6)
    for name, err in e.items():
        c.check(name, err, tols[name])
    c.check("straight at g=0", straight, 1e-10)
    c.finish()


def test_criterion_08_shoot_connect(acceptance_log):
    c = Criterion(acceptance_log, 8, "shoot/connect round-trip, 50 triples per g")
    for g in G_SET:
        ev = eds = 0.0
        for R, U, ds in sample_initial_data(g, 50, seed=SEED + 8):
            cv = connect(g, R, shoot(g, R, U, ds))
            ev = max(ev, np.max(np.abs(eval_velocity(cv, 0.0).components - U)) / np.max(np.abs(U)))
            eds = max(eds, _rel(cv.delta_s, ds))
        c.check(f"velocity g={g}", ev, 1e-7)
        c.check(f"delta_s g={g}", eds, 1e-8)
    c.finish()


def test_criterion_09_duality(acceptance_log):
    c = Criterion(acceptance_log, 9, "duality and co-space")
    rng = np.random.default_rng(SEED)
    dual = 0.0
    for g in G_SET:
        for X in rng.normal(size=(100, 4)):
            dual = max(dual, _rel(fhf_H(g, X), fmf_F(-g, X)))
    c.check("H(g;X) = F(-g;X)", dual, 1e-12)
    leg = max(legendre_duality_check(g, R) for g in G_SET for R in sample_timelike(g, 50, seed=(SEED, 9)))
    c.check("Legendre residual", leg, 1e-8)
    sym = 0.0
    for g in G_SET:
        pts = sample_timelike(-g, 40, seed=(SEED, 90))
        for P1, P2 in zip(pts[::2], pts[1::2]):
            sym = max(sym, abs(co_angle(g, P1, P2) - co_angle(g, P2, P1)))
    c.check("co-angle symmetry", sym, 4 * np.finfo(float).eps)
    flat = 0.0
    for g in (0.0, 1e-12):
        for R1, R2 in sample_pairs(0.0, 20, seed=(SEED, 91)):
            x, y = R1.components, R2.components
            mink = lambda v: math.sqrt(v[0] ** 2 - v[1:] @ v[1:])
            rap = math.acosh(max((x[0] * y[0] - x[1:] @ y[1:]) / (mink(x) * mink(y)), 1.0))
            flat = max(flat, abs(angle(g, x, y) - rap) / max(rap, 1.0), abs(co_angle(g, x, y) - rap) / max(rap, 1.0))
    c.check("g -> 0 angles", flat, 1e-10)
    c.finish()


def test_criterion_10_cli_determinism(acceptance_log):
    c = Criterion(acceptance_log, 10, "CLI byte-identical output and verify exit code")
    commands = [
        ["--g", "1.5", "eval", "--vector", "3,1,0,0"],
        ["--g", "1.5", "transform", "--vector", "3,1,0,0"],
        ["--g", "1.5", "geodesic", "connect", "--from", "3,1,0,0", "--to", "5,1.5,0.5,0", "--samples", "25"],
        ["--g", "1.5", "--format", "jsonl", "verify", "--samples", "100", "--seed", "42"],
    ]
    for argv in commands:
        name = next(a for a in argv if a in ("eval", "transform", "geodesic", "verify"))
        runs = [subprocess.run([sys.executable, "-m", "finsleroid", *argv], capture_output=True) for _ in range(2)]
        c.flag(name, runs[0].stdout == runs[1].stdout and runs[0].returncode == runs[1].returncode == 0)
    fail = subprocess.run(
        [sys.executable, "-m", "finsleroid", "--g", "1.5", "verify", "--samples", "20", "--tol", "cartan=1e-12"],
        capture_output=True,
    )
    c.flag("verify failure exit code", fail.returncode == 1)
    c.finish()
