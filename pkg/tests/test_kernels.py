import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcurv.core import DEFAULT_QUAD
from qcurv.curvature import q_density
from qcurv.kernels import (greens_solve, kernel_G, kernel_II, kernel_log, kernel_table,
                           offset_grids, rv_dot_limits, sphere_mean, verify_lemma2)
from qcurv.profiles import w_a_profile


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_sphere_mean_constant_and_odd(n):
    assert sphere_mean(lambda t: np.ones_like(t), n) == pytest.approx(1.0, abs=1e-12)
    assert sphere_mean(np.cos, n) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_sphere_mean_cos_squared(n):
    assert sphere_mean(lambda t: np.cos(t) ** 2, n) == pytest.approx(1.0 / n, rel=1e-12)


@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0))
def test_ii_closed_form_n4(r, s):
    if abs(r - s) < 1e-3 * max(r, s):
        return
    got = kernel_II(r, s, 4, "quadrature")
    assert got == pytest.approx(1.0 / max(r, s) ** 2, rel=1e-8)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_ii_origin_and_symmetry(n):
    r = np.array([0.5, 1.0, 3.0])
    assert np.allclose(kernel_II(r, 0.0 * r, n), 1.0 / r**2, rtol=1e-12)
    assert kernel_II(2.0, 3.0, n) == pytest.approx(kernel_II(3.0, 2.0, n), rel=1e-12)


def test_g_closed_form_n4():
    r, s = 2.0, 0.7
    assert kernel_G(r, s, 4, "quadrature") == pytest.approx(1 - s**2 / (2 * r**2), rel=1e-8)
    assert kernel_G(s, r, 4, "quadrature") == pytest.approx(s**2 / (2 * r**2), rel=1e-8)
    assert kernel_G(np.array([1.5]), np.array([0.0]), 4)[0] == pytest.approx(1.0)
    assert kernel_G(1e4, 1.0, 4) == pytest.approx(1.0, abs=1e-6)


def test_log_kernel():
    assert kernel_log(0.0, 2.0, 4) == pytest.approx(0.0, abs=1e-12)
    r = np.array([0.5, 1.0, 3.0])
    s = np.array([2.0, 0.4, 3.5])
    assert np.allclose(kernel_log(r, s, 2, "quadrature"), np.minimum(0.0, np.log(s / r)),
                       atol=1e-8)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_series_matches_quadrature(n):
    r, s = offset_grids(6)
    tab_s = kernel_table(n, r, s, "series")
    tab_q = kernel_table(n, r, s, "quadrature")
    for a, b in zip(tab_s.rows(), tab_q.rows()):
        np.testing.assert_allclose(a[2:], b[2:], rtol=1e-7, atol=1e-10)


def test_structure_fit_cases():
    r, s = offset_grids()
    rep4 = verify_lemma2(4, r, s)
    assert rep4.residual < 1e-8
    assert all(abs(c) < 1e-8 for c in rep4.poly)
    rep2 = verify_lemma2(2, r, s)
    assert rep2.handled_case is not None
    rep6 = verify_lemma2(6, r, s)
    assert rep6.residual < 1e-6
    assert len(rep6.poly) <= 3


def test_greens_zero_source():
    sol = greens_solve(lambda x: 0.0 * x, 4)
    r = np.geomspace(1e-2, 100.0, 20)
    assert np.allclose(sol(r), 0.0)
    assert rv_dot_limits(lambda x: 0.0 * x, 4).as_tuple()[:2] == pytest.approx((0.0, 0.0), abs=1e-12)


@pytest.mark.parametrize("a", [-1.0, -0.5])
def test_greens_recovers_w_a(a):
    p = w_a_profile(a)
    src = lambda x: q_density(p, 4, x)  # noqa: E731
    sol = greens_solve(src, 4)
    r = np.concatenate([[0.0], np.geomspace(1e-3, DEFAULT_QUAD.r_max, 200)])
    assert np.max(np.abs(sol(r) - (p(r) - p(np.array([0.0]))[0]))) < 10 * DEFAULT_QUAD.eps_quad
    lim = rv_dot_limits(src, 4, solution=sol)
    assert lim.origin == pytest.approx(0.0, abs=1e-3)
    assert lim.infinity == pytest.approx(a, abs=1e-3)


def test_greens_bump_residual():
    def bump(x):
        return np.where(np.abs(x - 2.0) < 1.0, np.cos(np.pi * (x - 2.0) / 2) ** 4, 0.0)

    sol = greens_solve(bump, 4, breakpoints=(1.0, 3.0))
    assert sol.residual(np.linspace(1.2, 2.8, 9)) < 1e-4
