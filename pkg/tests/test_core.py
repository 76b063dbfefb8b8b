from math import pi

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcurv.core import (DimensionError, QuadratureSpec, composite_gl, double_factorial,
                        make_dim, polar_rule, richardson_limit, to_jsonable)


def test_c2_and_c4():
    assert make_dim(2).c_n == pytest.approx(1 / (2 * pi), rel=1e-12)
    assert make_dim(4).c_n == pytest.approx(1 / (8 * pi**2), rel=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_normalization_identity(n):
    d = make_dim(n)
    assert d.m == n // 2
    assert d.c_n * d.sphere_volume * double_factorial(n - 2) ** 2 == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("n", [3, 0, 10, -2, 2.5])
def test_bad_dimension(n):
    with pytest.raises(DimensionError):
        make_dim(n)


@pytest.mark.parametrize("kwargs", [{"radial_nodes": 3}, {"eps_quad": 0.0}, {"r_max": 1.0}])
def test_quadrature_settings_invariants(kwargs):
    with pytest.raises(ValueError):
        QuadratureSpec(**kwargs)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_polar_rule_is_normalized(n):
    t, w = polar_rule(n, 16)
    assert np.all(w > 0)
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    # mean of t^2 over S^{n-1} is 1/n
    assert np.dot(w, t**2) == pytest.approx(1.0 / n, rel=1e-13)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=8))
def test_composite_gl_exact_on_polynomials(coeffs):
    poly = np.polynomial.Polynomial(coeffs)
    val, _ = composite_gl(poly, np.array([0.0, 0.5, 2.0]), 8)
    exact = poly.integ()(2.0) - poly.integ()(0.0)
    assert val == pytest.approx(exact, abs=1e-11 * (1 + np.abs(coeffs).sum()))


@given(st.floats(-5, 5), st.floats(0.5, 3))
def test_richardson_recovers_limit(a, b):
    lim = richardson_limit(lambda r: a + b / r + 1.0 / r**2, 10.0, "infinity")
    assert lim.value == pytest.approx(a, abs=1e-8)


def test_to_jsonable():
    out = to_jsonable({"a": np.float64(1.5), "b": (np.int64(2), np.bool_(True)),
                       "c": np.array([np.inf]), 3: None})
    assert out == {"a": 1.5, "b": [2, True], "c": ["inf"], "3": None}
