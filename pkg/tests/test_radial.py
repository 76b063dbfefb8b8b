import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcurv.core import NotPolyharmonic, OrderError
from qcurv.corpus import corpus
from qcurv.profiles import RadialProfile, Term
from qcurv.radial import (asymptotic_exponent, basis_decompose, completeness_check,
                          equality_case_check, polyharmonic_basis, radial_delta_power,
                          scalar_sign_gate)

R = np.geomspace(0.1, 10.0, 40)


def power(c, p):
    return RadialProfile.analytic([Term("power", c, p=p)], punctured_origin=p < 0)


def test_delta_power_rule():
    r = np.array([0.0, 0.5, 2.0])
    assert np.allclose(radial_delta_power(power(1.0, 2.0), 4, 1, r), 8.0)
    assert np.allclose(radial_delta_power(power(1.0, 4.0), 4, 2, r), 192.0)
    log = RadialProfile.analytic([Term("log", 1.0)], punctured_origin=True)
    assert radial_delta_power(log, 4, 1, np.array([2.0]))[0] == pytest.approx(0.5)


def test_delta_power_jet_callable_matches_profile():
    p = RadialProfile.analytic([Term("log1p_sq", -0.5)])
    r = np.array([0.0, 0.3, 1.0, 4.0])
    fn = lambda x: -0.5 * (1.0 + x * x).log()  # noqa: E731
    for k in range(3):
        np.testing.assert_allclose(radial_delta_power(fn, 4, k, r),
                                   radial_delta_power(p, 4, k, r), rtol=1e-10, atol=1e-12)


def test_delta_power_order_checks():
    with pytest.raises(OrderError):
        radial_delta_power(power(1.0, 2.0), 4, 3, R)
    low = RadialProfile.analytic([Term("power", 1.0, p=2.0)], max_order=2)
    with pytest.raises(OrderError):
        radial_delta_power(low, 4, 2, R)


def test_basis_lists():
    assert [b.label for b in polyharmonic_basis(4)] == ["1", "ln r", "r^2", "r^-2"]
    assert [b.label for b in polyharmonic_basis(2)] == ["1", "ln r"]


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_basis_is_polyharmonic(n):
    for b in polyharmonic_basis(n):
        assert np.allclose(radial_delta_power(b.profile, n, n // 2, R), 0.0, atol=1e-9)


def test_decompose_examples():
    dec = basis_decompose(R, 3 + 2 * np.log(R), 4).as_dict()
    assert dec["1"] == pytest.approx(3.0) and dec["ln r"] == pytest.approx(2.0)
    assert abs(dec["r^2"]) < 1e-10 and abs(dec["r^-2"]) < 1e-10
    dec = basis_decompose(R, R**-2 - R**2, 4).as_dict()
    assert dec["r^-2"] == pytest.approx(1.0) and dec["r^2"] == pytest.approx(-1.0)
    with pytest.raises(NotPolyharmonic):
        basis_decompose(R, R**3, 4)


@given(st.lists(st.floats(-2.0, 2.0), min_size=6, max_size=6))
def test_decompose_roundtrip_n6(coef):
    basis = polyharmonic_basis(6)
    u = sum(c * b(R) for c, b in zip(coef, basis))
    got = basis_decompose(R, u, 6).coefficients
    np.testing.assert_allclose(got, coef, atol=1e-8)


@pytest.mark.parametrize("a", [-2.0, -1.0, -0.5, 0.3])
def test_exponent_of_w_a(a):
    p = RadialProfile.analytic([Term("log1p_sq", a / 2)])
    assert asymptotic_exponent(p, "infinity").value == pytest.approx(a, abs=1e-6)
    assert asymptotic_exponent(p, "origin").value == pytest.approx(0.0, abs=1e-6)


def test_exponent_puncture():
    cyl = RadialProfile.analytic([Term("log", -1.0)], punctured_origin=True)
    assert asymptotic_exponent(cyl, "origin").value == pytest.approx(-1.0, abs=1e-12)


def test_exponent_matches_corpus_terms():
    for e in corpus():
        p = e.profile
        if p.representation != "analytic":
            continue
        expected = sum(2 * t.c if t.kind == "log1p_sq" else t.c if t.kind == "log" else 0.0
                       for t in p.terms if t.kind != "power" or t.p == 0)
        if any(t.kind == "power" and t.p != 0 for t in p.terms):
            continue
        assert asymptotic_exponent(p, "infinity").value == pytest.approx(expected, abs=1e-4)


def test_completeness(flat, w_minus_one, sphere):
    res = completeness_check(flat)
    assert res.complete and res.c1 == pytest.approx(0.0, abs=1e-6)
    res = completeness_check(w_minus_one)
    assert res.complete and res.borderline
    assert completeness_check(sphere).verdict == "incomplete"


def test_equality_case(flat, w_minus_one, cylinder):
    assert equality_case_check(w_minus_one)
    assert not equality_case_check(flat)
    assert equality_case_check(cylinder)


def test_scalar_sign_gate_agrees():
    for e in corpus():
        gate = scalar_sign_gate(e.profile, 4, np.geomspace(0.2, 50.0, 30))
        assert gate.agree
