import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finsleroid import (
    AccuracyError,
    DomainError,
    SectorError,
    SingularityError,
    cartan_tensor,
    covector_of,
    curvature_check,
    derive_params,
    fmf_F,
    func_A,
    func_L,
    metric_tensor,
    quadratic_form_B,
    weight_j,
)
from finsleroid.metric import curvature_fit, implied_indicatrix_curvature
from finsleroid.verify import fd_gradient, hessian_oracle_error, sample_timelike

from . import oracle

ETA = np.diag([1.0, -1.0, -1.0, -1.0])

gs = st.floats(-3, 3)
ratios = st.floats(0.0, 0.9)
scales = st.floats(0.1, 10)
dirs = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(lambda t: sum(x * x for x in t) > 1e-2)


def _point(g, ratio, scale, d):
    p = derive_params(g)
    n = np.array(d) / np.linalg.norm(d)
    return np.concatenate([[scale], ratio * scale / p.g_sup_plus * n])


@pytest.mark.parametrize(
    "g, vec, val", [(0.0, (2, 1, 0, 0), -3.0), (1.5, (3, 1, 0, 0), -3.5), (1.5, (2, 1, 0, 0), 0.0)]
)
def test_quadratic_form(g, vec, val):
    assert quadratic_form_B(g, vec) == pytest.approx(val, abs=1e-15)


def test_weight_j_values():
    assert weight_j(0.0, (2, 1, 0, 0)) == 1.0
    assert weight_j(1.5, (3, 1, 0, 0)) == pytest.approx(3.5**0.3, rel=1e-14)
    assert weight_j(1.5, (3, 1, 0, 0)) == pytest.approx(oracle.f(oracle.j(1.5, (3, 1, 0, 0))), rel=1e-14)
    assert weight_j(1.5, (1, 0, 0, 0)) == 1.0
    with pytest.raises(SingularityError):
        weight_j(1.5, (2, 1, 0, 0))


def test_fmf_values():
    assert fmf_F(0.0, (2, 1, 0, 0)) == pytest.approx(math.sqrt(3), rel=1e-15)
    ref = oracle.f(oracle.F(1.5, (3, 1, 0, 0)))
    assert ref == pytest.approx(3.5**0.8, rel=1e-15)
    assert fmf_F(1.5, (3, 1, 0, 0)) == pytest.approx(ref, rel=1e-14)
    assert round(fmf_F(1.5, (3, 1, 0, 0)), 5) == 2.72430
    assert fmf_F(1.5, (6, 2, 0, 0)) == pytest.approx(2 * 3.5**0.8, rel=1e-14)
    assert fmf_F(1.5, (2, 1, 0, 0)) == 0.0
    with pytest.raises(DomainError):
        fmf_F(1.5, (0, 0, 0, 0))


@pytest.mark.parametrize("vec", [(1, 1, 0, 0), (-3, 1, 0, 0), (0.1, -2, 3, 0.5)])
def test_fmf_all_sectors_against_oracle(vec):
    assert fmf_F(0.7, vec) == pytest.approx(oracle.f(oracle.F(0.7, vec)), rel=1e-13)


def test_A_and_L():
    assert (func_A(0, (2, 1, 0, 0)), func_L(0, (2, 1, 0, 0))) == (2.0, 1.0)
    assert func_A(1.5, (3, 1, 0, 0)) == pytest.approx(2.25)
    assert func_L(1.5, (3, 1, 0, 0)) == pytest.approx(-1.25)


@given(gs, ratios, scales, dirs)
def test_A_squared_identity(g, ratio, scale, d):
    x = _point(g, ratio, scale, d)
    p = derive_params(g)
    m = np.linalg.norm(x[1:])
    assert func_A(p, x) ** 2 - p.h**2 * m**2 == pytest.approx(-quadratic_form_B(p, x), rel=1e-10, abs=1e-12 * scale**2)


@given(gs, ratios, scales, dirs, st.floats(0.01, 100))
def test_fmf_homogeneous(g, ratio, scale, d, lam):
    x = _point(g, ratio, scale, d)
    assert fmf_F(g, lam * x) == pytest.approx(lam * fmf_F(g, x), rel=1e-12)


def test_covector_flat():
    P = covector_of(0.0, (2, 1, 0, 0))
    np.testing.assert_allclose(P.components, [2, -1, 0, 0], atol=1e-15)


def test_covector_against_finite_differences(p15, R31):
    grad, _ = fd_gradient(lambda y: fmf_F(p15, y) ** 2 / 2, R31)
    np.testing.assert_allclose(covector_of(p15, R31).components, grad, rtol=1e-6, atol=1e-9)


@given(gs, ratios, scales, dirs, st.floats(0.01, 100))
def test_covector_homogeneous(g, ratio, scale, d, lam):
    x = _point(g, ratio, scale, d)
    np.testing.assert_allclose(covector_of(g, lam * x).components, lam * covector_of(g, x).components, rtol=1e-11, atol=1e-12 * lam * scale)


def test_metric_flat():
    np.testing.assert_allclose(metric_tensor(0.0, (2, 1, 0, 0)).components, ETA, atol=1e-15)


def test_metric_det_example(p15, R31):
    assert metric_tensor(p15, R31).det == pytest.approx(-(3.5**2.4), rel=1e-12)


@given(gs, ratios, scales, dirs)
@settings(max_examples=50)
def test_metric_euler(g, ratio, scale, d):
    x = _point(g, ratio, scale, d)
    if np.linalg.norm(x[1:]) < 1e-3 * scale:
        return
    gt = metric_tensor(g, x)
    assert gt.norm_squared(x) == pytest.approx(fmf_F(g, x) ** 2, rel=1e-12)
    np.testing.assert_allclose(gt.lower(x), covector_of(g, x).components, rtol=1e-10, atol=1e-12 * scale)
    assert gt.signature() == (1, 3)


def test_metric_preconditions(p15):
    with pytest.raises(SectorError):
        metric_tensor(p15, (1, 1, 0, 0))
    with pytest.raises(SingularityError):
        metric_tensor(p15, (1, 0, 0, 0))


@pytest.mark.parametrize("g", [0.2, 1.5, -0.8])
def test_metric_matches_hessian_oracle(g):
    for R in sample_timelike(g, 10, seed=3):
        assert hessian_oracle_error(g, R) < 1e-6


def test_cartan_vanishes_flat():
    assert not np.any(cartan_tensor(0.0, (2, 1, 0.3, 0)).components)


def test_cartan_contraction_example(p15, R31):
    ct = cartan_tensor(p15, R31)
    F = fmf_F(p15, R31)
    assert ct.norm_squared() == pytest.approx(-9.0 / F**2, rel=1e-4)
    assert np.max(np.abs(np.einsum("pqr,r->pq", ct.components, R31))) < 1e-7
    assert ct.form_residual() < 1e-3


def test_cartan_rejects_underflowing_step(p15):
    with pytest.raises(AccuracyError):
        cartan_tensor(p15, (1.0, 0.49999999995, 0, 0))


@pytest.mark.parametrize("g, s", [(0.0, 0.0), (1.5, 0.5625), (1.0, 0.25), (0.5, 0.0625)])
def test_curvature_scalar(g, s):
    R = (3.0, 0.6, 0.2, -0.1) if g else (2.0, 1.0, 0.0, 0.0)
    assert curvature_check(g, R) == pytest.approx(s, abs=1e-3)
    if g:
        assert curvature_fit(g, R)[1] < 1e-3


def test_indicatrix_curvature():
    assert implied_indicatrix_curvature(0.25) == -1.25
