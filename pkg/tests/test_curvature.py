import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcurv.core import DimensionError
from qcurv.curvature import (calibration_constants, curvature_frame, curvature_frames,
                             curved_laplacian, paneitz_apply, pfaffian, q4_general,
                             q_curvature_lcf, ricci, scalar_curvature, schouten, sigma_k)
from qcurv.jets import Jet
from qcurv.profiles import RadialProfile, Term, w_a_profile

VARIANTS = ("sigma_route", "faf1_route", "div4_route")
radius = st.floats(0.0, 10.0)


def test_flat_is_flat(flat):
    r = np.linspace(0, 5, 11)
    assert np.all(scalar_curvature(flat, 4, r) == 0)
    assert np.all(ricci(flat, 4, 1.3) == 0)
    assert np.all(schouten(flat, 4, 1.3) == 0)
    assert np.all(q_curvature_lcf(flat, 4, r) == 0)
    assert np.all(q4_general(flat, 4, r) == 0)
    fr = curvature_frame(flat, 4, 0.7)
    assert all(pfaffian(fr, 4, v) == 0 for v in VARIANTS)


@given(radius)
def test_round_sphere_constants(r):
    from qcurv.profiles import round_sphere_profile

    p = round_sphere_profile()
    assert scalar_curvature(p, 4, r) == pytest.approx(12.0, rel=1e-10)
    assert q_curvature_lcf(p, 4, r) == pytest.approx(6.0, rel=1e-9)
    assert q4_general(p, 4, r) == pytest.approx(6.0, rel=1e-9)


def test_round_sphere_tensors_at_origin(sphere):
    np.testing.assert_allclose(ricci(sphere, 4, 0.0), 12 * np.eye(4), atol=1e-12)
    np.testing.assert_allclose(schouten(sphere, 4, 0.0), 2 * np.eye(4), atol=1e-12)
    fr = curvature_frame(sphere, 4, 0.0)
    np.testing.assert_allclose(fr.eig, 0.5, atol=1e-14)
    assert sigma_k(fr, 2) == pytest.approx(1.5, rel=1e-13)
    assert pfaffian(fr, 4, "faf1_route") == pytest.approx(6 / (8 * np.pi**2), rel=1e-12)


def test_scalar_curvature_at_origin():
    assert scalar_curvature(w_a_profile(-1.0), 4, 0.0) == pytest.approx(24.0, rel=1e-14)


def test_cylinder(cylinder):
    fr = curvature_frame(cylinder, 4, 1.0)
    np.testing.assert_allclose(sorted(fr.eig), [-0.5, 0.5, 0.5, 0.5], atol=1e-14)
    assert sigma_k(fr, 2) == pytest.approx(0.0, abs=1e-14)
    r = np.geomspace(0.1, 10, 9)
    np.testing.assert_allclose(q_curvature_lcf(cylinder, 4, r), 0.0, atol=1e-12)
    for x in r:
        assert pfaffian(curvature_frame(cylinder, 4, x), 4) == pytest.approx(0.0, abs=1e-13)


@given(st.floats(-1.0, 1.0), st.floats(0.3, 3.0), st.floats(0.0, 8.0))
def test_tensors_symmetric_and_sigma1_is_J(c, rho, r):
    p = RadialProfile.analytic([Term("log1p_sq", c, rho=rho)])
    ric = ricci(p, 4, r)
    np.testing.assert_allclose(ric, ric.T, atol=1e-14)
    fr = curvature_frame(p, 4, r)
    assert sigma_k(fr, 1) == pytest.approx(fr.J, rel=1e-9, abs=1e-12)


@given(st.floats(-1.0, 0.5), st.floats(0.5, 2.0))
def test_q4_general_matches_lcf(c, rho):
    p = RadialProfile.analytic([Term("log1p_sq", c, rho=rho)])
    r = np.linspace(0.0, 10.0, 41)
    qg, ql = q4_general(p, 4, r), q_curvature_lcf(p, 4, r)
    np.testing.assert_allclose(qg, ql, rtol=1e-6, atol=1e-12)


def test_curved_laplacian(sphere, flat):
    r = np.linspace(0.1, 3, 7)
    assert np.allclose(curved_laplacian(lambda x: 0 * x + 2.0, sphere, 4, r), 0.0)
    # flat metric: Delta r^2 = 2n
    np.testing.assert_allclose(curved_laplacian(lambda x: x * x, flat, 4, r), 8.0)


@given(st.floats(-1.0, 0.0))
def test_paneitz_is_conformal_bilaplacian(a):
    p = w_a_profile(a)
    r = np.linspace(0.1, 3.0, 15)
    f = lambda x: (-(x * x)).exp()  # noqa: E731
    u = f(Jet.variable(r, 4))
    for _ in range(2):
        du = u.deriv()
        u = du.deriv() + 3 * du.div_r()
    ref = np.exp(-4 * p(r)) * u.value
    np.testing.assert_allclose(paneitz_apply(f, p, 4, r), ref, rtol=1e-5, atol=1e-10)


def test_paneitz_kills_constants(sphere):
    assert np.allclose(paneitz_apply(lambda x: 0 * x + 3.0, sphere, 4, np.array([0.5, 1.5])), 0)


@pytest.mark.parametrize("r", [0.0, 0.4, 1.7, 5.0])
def test_pfaffian_routes_agree(r, sphere):
    p = RadialProfile.analytic([Term("log1p_sq", -0.4, rho=0.6), Term("log1p_sq", 0.15, rho=1.3)])
    for prof in (p, sphere):
        fr = curvature_frame(prof, 4, r)
        vals = [pfaffian(fr, 4, v) for v in VARIANTS]
        np.testing.assert_allclose(vals, vals[0], rtol=1e-5, atol=1e-12)


def test_calibration_ratios():
    cal = calibration_constants()
    for n, expected in ((2, 1.0), (4, 4.0), (6, 48.0), (8, 1152.0)):
        assert cal.ratio_to_cn(n) == pytest.approx(expected, rel=1e-9)
    assert cal.div4_calib == pytest.approx(2.0, rel=1e-9)
    assert cal.kappa_div == pytest.approx(2.0, rel=1e-9)


def test_frames_serialize(sphere):
    frames = curvature_frames(sphere, 6, [0.5, 1.0])
    d = frames[0].to_dict()
    assert d["n"] == 6 and len(d["sigma"]) == 3
    assert d["pfaff_div4"] is None


def test_dimension_checked(sphere):
    with pytest.raises(DimensionError):
        scalar_curvature(sphere, 5, 1.0)
