import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcurv.core import DomainError, OrderError, SchemaError
from qcurv.curvature import q_curvature_lcf, scalar_curvature
from qcurv.jets import Jet, poly_step
from qcurv.profiles import (RadialProfile, SphericalField, Term, eval_profile, load_profile,
                            parse_profile, w_a_profile)

half_log = RadialProfile.analytic([Term("log1p_sq", -0.5, rho=1.0)])
term_st = st.one_of(
    st.builds(lambda c, rho: Term("log1p_sq", c, rho=rho), st.floats(-2, 2), st.floats(0.3, 3)),
    st.builds(lambda c, p: Term("power", c, p=p), st.floats(-1, 1), st.sampled_from([0.0, 2.0, 4.0])),
)


def test_eval_profile_examples():
    assert eval_profile(half_log, 0.0, 0) == 0.0
    assert eval_profile(half_log, 1.0, 1) == pytest.approx(-0.5, rel=1e-15)
    log = RadialProfile.analytic([Term("log", -1.0)], punctured_origin=True)
    assert eval_profile(log, 2.0, 1) == pytest.approx(-0.5, rel=1e-15)


def test_order_limits():
    with pytest.raises(OrderError):
        eval_profile(half_log, 1.0, 5, dim=4)
    with pytest.raises(OrderError):
        eval_profile(half_log, 1.0, -1)


def test_punctured_domain():
    log = RadialProfile.analytic([Term("log", 1.0)], punctured_origin=True)
    with pytest.raises(DomainError):
        log(np.array([0.0]))
    with pytest.raises(ValueError):
        RadialProfile.analytic([Term("log", 1.0)])


@given(st.lists(term_st, min_size=1, max_size=3), st.floats(0.1, 10.0), st.integers(0, 3))
def test_derivatives_match_finite_differences(terms, r, order):
    p = RadialProfile.analytic(terms)
    h = 1e-3 * r
    # fourth-order central difference of the next-lower derivative
    lower = lambda x: eval_profile(p, x, order)  # noqa: E731
    fd = (-lower(r + 2 * h) + 8 * lower(r + h) - 8 * lower(r - h) + lower(r - 2 * h)) / (12 * h)
    exact = eval_profile(p, r, order + 1)
    scale = max(abs(exact), np.max(np.abs([lower(r + k * h) for k in (-2, 2)])) / r, 1e-8)
    assert abs(fd - exact) <= 1e-6 * scale


@given(st.lists(term_st, min_size=1, max_size=3))
def test_jet_matches_derivatives(terms):
    p = RadialProfile.analytic(terms)
    r = np.array([0.3, 1.0, 2.7])
    J = p.jet(r, 4)
    for k in range(5):
        np.testing.assert_allclose(J.derivative(k), p.derivative(r, k), rtol=1e-11, atol=1e-11)


def test_sampled_round_trip_curvature():
    p = w_a_profile(-0.5)
    grid = np.concatenate([[0.0], np.geomspace(1e-3, 60.0, 500)])
    s = RadialProfile.sampled(grid, p(grid), max_order=4)
    r = np.linspace(0.2, 10.0, 25)
    np.testing.assert_allclose(scalar_curvature(s, 4, r), scalar_curvature(p, 4, r), atol=1e-4)
    np.testing.assert_allclose(q_curvature_lcf(s, 4, r), q_curvature_lcf(p, 4, r), atol=1e-4)


def test_sampled_is_even_at_origin():
    grid = np.linspace(0.0, 5.0, 60)
    s = RadialProfile.sampled(grid, np.cos(grid), max_order=4)
    assert abs(s.derivative(np.array([0.0]), 1)[0]) < 1e-12


@given(st.floats(-0.5, 1.5))
def test_poly_step_shape(x):
    y = poly_step(Jet.variable(np.array([x]), 3))
    v = y.value[0]
    assert 0.0 <= v <= 1.0
    if x <= 0:
        assert v == 0.0 and np.all(y.c[1:] == 0)
    if x >= 1:
        assert v == 1.0 and np.all(y.c[1:] == 0)
    assert y.c[1, 0] >= 0.0


def test_poly_step_symmetry():
    x = np.linspace(0.05, 0.95, 19)
    a = poly_step(Jet.variable(x, 0)).value
    b = poly_step(Jet.variable(1 - x, 0)).value
    np.testing.assert_allclose(a + b, 1.0, atol=1e-14)


def test_jet_arithmetic():
    x = Jet.variable(np.array([0.5, 2.0]), 4)
    u = (x * x).exp() / (1.0 + x)
    # d/dx [exp(x^2)/(1+x)] = exp(x^2)(2x(1+x) - 1)/(1+x)^2
    r = x.value
    np.testing.assert_allclose(u.derivative(1), np.exp(r**2) * (2 * r * (1 + r) - 1) / (1 + r) ** 2,
                               rtol=1e-13)
    np.testing.assert_allclose(x.log().derivative(2), -1 / r**2, rtol=1e-13)


def test_jet_div_r_at_origin():
    x = Jet.variable(np.array([0.0]), 4)
    u = (x * x).deriv()  # 2x
    np.testing.assert_allclose(u.div_r().value, [2.0])


# -- profile documents ----------------------------------------------------

GOOD = {"n": 4, "profile": {"type": "analytic", "punctured_origin": False,
                            "terms": [{"kind": "log1p_sq", "c": -0.5, "rho": 1.0}]}}


def test_parse_good_document(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(GOOD))
    doc = load_profile(path)
    assert doc.n == 4
    assert doc.profile(np.array([1.0]))[0] == pytest.approx(-0.5 * np.log(2))


def test_parse_sampled_document():
    r = np.linspace(0, 5, 20)
    doc = parse_profile({"n": 4, "profile": {"type": "sampled", "r": r.tolist(),
                                                   "w": (-r**2 / 10).tolist()}})
    assert doc.profile.representation == "sampled"


@pytest.mark.parametrize("doc", [
    {"n": 4},
    {"n": 5, "profile": GOOD["profile"]},
    {**GOOD, "extra": 1},
    {"n": 4, "profile": {"type": "analytic", "terms": [{"kind": "exp", "c": 1.0}]}},
    {"n": 4, "profile": {"type": "analytic", "terms": [{"kind": "log1p_sq", "c": 1.0, "rho": -1}]}},
    {"n": 4, "profile": {"type": "analytic", "terms": [{"kind": "log", "c": 1.0}]}},
    {"n": 4, "profile": {"type": "sampled", "r": list(range(12)), "w": list(range(13))}},
])
def test_schema_rejections(doc):
    with pytest.raises(SchemaError):
        parse_profile(doc)


def test_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(SchemaError):
        load_profile(path)


def test_field_from_profile_shapes(w_minus_one):
    r = np.geomspace(0.1, 10, 30)
    fld = SphericalField.from_profile(w_minus_one, r, 4, nodes=16, eps=0.1, harmonic="cos")
    assert fld.values.shape == (30, 16)
    assert fld.weights.sum() == pytest.approx(1.0)
