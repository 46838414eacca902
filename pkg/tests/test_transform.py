import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finsleroid import DomainError, SingularityError, derive_params, fmf_F, metric_tensor, weight_j
from finsleroid.transform import (
    christoffel,
    mu,
    mu_jacobian,
    n_tensor,
    pullback_metric,
    s_norm,
    sigma,
    sigma_jacobian,
    transverse_projector,
)
from finsleroid.verify import sample_timelike

from . import oracle

ETA = np.diag([1.0, -1.0, -1.0, -1.0])


def test_sigma_identity_at_zero():
    np.testing.assert_array_equal(sigma(0.0, (2, 1, 0, 0)).components, [2, 1, 0, 0])


def test_sigma_example(p15, R31):
    t = sigma(p15, R31).components
    ref = [oracle.f(c) for c in oracle.sigma(1.5, R31)]
    np.testing.assert_allclose(t, ref, rtol=1e-14)
    assert t[0] == pytest.approx(3.5**0.3 * 2.25, rel=1e-14)
    assert t[1] == pytest.approx(1.25 * 3.5**0.3, rel=1e-14)
    assert s_norm(t) ** 2 == pytest.approx(3.5**1.6, rel=1e-13)


def test_sigma_homogeneous(p15):
    x = np.array([3.0, 0.4, -0.7, 0.2])
    np.testing.assert_allclose(sigma(p15, 2 * x).components, 2 * sigma(p15, x).components, rtol=1e-14)


def test_mu_roundtrip_and_homogeneity(p15, R31):
    np.testing.assert_allclose(mu(p15, sigma(p15, R31)).components, R31, rtol=1e-12)
    t = np.array([2.0, 0.5, 0.3, -0.1])
    np.testing.assert_allclose(mu(p15, 3 * t).components, 3 * mu(p15, t).components, rtol=1e-14)
    np.testing.assert_allclose(sigma(p15, mu(p15, t)).components, t, rtol=1e-12)


def test_mu_outside_quasicone():
    with pytest.raises(SingularityError):
        mu(1.0, (1, 1, 0, 0))
    with pytest.raises(DomainError):
        mu(1.0, (1, 2, 0, 0))


def test_jacobian_examples(p15, R31):
    assert np.allclose(sigma_jacobian(0.0, (2, 1, 0, 0)).forward, np.eye(4))
    jp = sigma_jacobian(p15, R31)
    assert jp.det == pytest.approx(3.5**1.2 * 1.953125, rel=1e-12)
    assert jp.inversion_residual() < 1e-12


@pytest.mark.parametrize("g", [0.3, 1.5, -2.0])
def test_jacobian_matches_finite_differences(g):
    p = derive_params(g)
    for R in sample_timelike(p, 5, seed=4):
        x = R.components
        e = 1e-6 * fmf_F(p, x)
        fd = np.column_stack(
            [(sigma(p, x + e * d).components - sigma(p, x - e * d).components) / (2 * e) for d in np.eye(4)]
        )
        np.testing.assert_allclose(sigma_jacobian(p, x).forward, fd, rtol=1e-6, atol=1e-7)
        t = sigma(p, x).components
        fd = np.column_stack([(mu(p, t + e * d).components - mu(p, t - e * d).components) / (2 * e) for d in np.eye(4)])
        np.testing.assert_allclose(mu_jacobian(p, t), fd, rtol=1e-6, atol=1e-7)


def test_n_tensor_examples(p15):
    low, up = n_tensor(0.0, (2, 1, 0, 0))
    np.testing.assert_array_equal(low, ETA)
    t = np.array([2.0, 0.5, 0.3, 0.1])
    low, up = n_tensor(p15, t)
    np.testing.assert_allclose(low @ up, np.eye(4), atol=1e-14)
    lu = t / s_norm(t)
    assert lu @ low @ lu == pytest.approx(1.0)
    np.testing.assert_allclose(low @ lu, ETA @ lu, atol=1e-14)
    # determinant pair: the inverse tensor carries -h^6
    assert np.linalg.det(up) == pytest.approx(-(1.25**6), rel=1e-12)
    assert np.linalg.det(low) == pytest.approx(-(1.25**-6), rel=1e-12)
    with pytest.raises(DomainError):
        n_tensor(p15, (1, 1, 0, 0))


def test_pullback_flat_and_consistent(p15):
    np.testing.assert_allclose(pullback_metric(0.0, (2, 1, 0, 0)).components, ETA, atol=1e-15)
    for R in sample_timelike(p15, 5, seed=9):
        a = pullback_metric(p15, R)
        assert a.det == pytest.approx(-weight_j(p15, R) ** 8, rel=1e-10)
        np.testing.assert_allclose(a.components, metric_tensor(p15, R).components, rtol=1e-12, atol=1e-13)


def test_christoffel_properties(p15):
    assert not np.any(christoffel(0.0, (2, 1, 0, 0)))
    t = np.array([2.0, 0.5, -0.3, 0.4])
    gam = christoffel(p15, t)
    assert np.max(np.abs(np.einsum("i,mij->mj", t, gam))) < 1e-14
    assert np.max(np.abs(np.einsum("jij->i", gam))) < 1e-14
    assert np.max(np.abs((t / s_norm(t)) @ transverse_projector(t))) < 1e-14


def test_christoffel_matches_metric_derivative(p15):
    t = np.array([2.0, 0.5, -0.3, 0.4])
    e = 1e-5
    dn = np.stack([(n_tensor(p15, t + e * d)[0] - n_tensor(p15, t - e * d)[0]) / (2 * e) for d in np.eye(4)])
    # dn[k, i, j] = d n_ij / d t^k; first-kind symbols Gamma_{l,ij}
    first = 0.5 * (np.einsum("ilj->lij", dn) + np.einsum("jli->lij", dn) - np.einsum("lij->lij", dn))
    second = np.einsum("ml,lij->mij", n_tensor(p15, t)[1], first)
    np.testing.assert_allclose(christoffel(p15, t), second, atol=1e-8)


@given(st.floats(-3, 3), st.integers(0, 2**31))
@settings(max_examples=25, deadline=None)
def test_isometry(g, seed):
    p = derive_params(g)
    for R in sample_timelike(p, 3, seed=seed):
        assert s_norm(sigma(p, R)) == pytest.approx(fmf_F(p, R), rel=1e-12)
