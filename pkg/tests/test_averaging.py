import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcurv.averaging import (claim2_ratio, rigidity_check, harmonicity_probe, spherical_symmetrize,
                             symmetrization_report, verify_shell_equality,
                             verify_sign_preservation)
from qcurv.core import DEFAULT_QUAD, PreconditionError, ResolutionError
from qcurv.gbc import total_q
from qcurv.profiles import RadialProfile, SphericalField, Term, w_a_profile

R = np.geomspace(0.05, 50.0, 160)


def eta(r):
    return np.exp(-((r - 2.0) ** 2))


def field(n, eps=0.1, harmonic="cos2", base=None, r=R):
    return SphericalField.from_profile(base or w_a_profile(-1.0), r, n, eps=eps, harmonic=harmonic)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_symmetrize_examples(n):
    base = w_a_profile(-1.0)
    assert np.allclose(spherical_symmetrize(field(n, 0.0)).w, base(R), atol=1e-14)
    assert np.allclose(spherical_symmetrize(field(n, 0.3, "cos")).w, base(R), atol=1e-13)
    got = spherical_symmetrize(field(n, 0.3, "cos2")).w
    assert np.allclose(got, base(R) + 0.3 / n * eta(R), atol=1e-13)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
@pytest.mark.parametrize("harmonic", ["cos", "cos2"])
def test_shell_equality(n, harmonic):
    assert verify_shell_equality(field(n, 0.1, harmonic)) < 10 * DEFAULT_QUAD.eps_quad
    assert verify_shell_equality(field(n, 0.0)) < DEFAULT_QUAD.eps_quad


def test_shell_equality_dimension_mismatch():
    with pytest.raises(ValueError):
        verify_shell_equality(field(4), dim=6)


def test_coarse_angular_grid_rejected():
    fld = SphericalField.from_function(lambda r, th: np.exp(3 * np.cos(th)) + 0 * r, R, 4, nodes=6)
    with pytest.raises(ResolutionError):
        verify_shell_equality(fld)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_sign_preservation(n, flat):
    assert verify_sign_preservation(field(n, 0.0))
    assert verify_sign_preservation(field(n, 0.01))
    assert verify_sign_preservation(field(n, 0.0, base=flat))


def test_sign_precondition():
    grow = RadialProfile.analytic([Term("log1p_sq", 1.0)])
    with pytest.raises(PreconditionError):
        verify_sign_preservation(field(4, 0.0, base=grow))


@given(st.floats(-3.0, 3.0))
def test_ratio_shift_invariant(c):
    base = w_a_profile(-1.0)
    shifted = RadialProfile.analytic(base.terms + (Term("power", c, p=0.0),))
    a = claim2_ratio(field(4, 0.1, base=base)).ratio
    b = claim2_ratio(field(4, 0.1, base=shifted)).ratio
    np.testing.assert_allclose(a, b, rtol=1e-12)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_ratio_tail(n):
    assert np.allclose(claim2_ratio(field(n, 0.0)).ratio, 1.0, atol=1e-14)
    assert abs(claim2_ratio(field(n, 0.1)).tail - 1.0) < 1e-3


def test_symmetrized_total_matches():
    fld = field(4, 0.1)
    w_bar = spherical_symmetrize(fld)
    assert total_q(w_bar, 4) == pytest.approx(total_q(w_a_profile(-1.0), 4), abs=1e-3)


def test_report_serializes():
    rep = symmetrization_report(field(4, 0.1), field_id="demo")
    d = rep.to_dict()
    assert d["field_id"] == "demo" and d["shell_defect"] >= 0 and d["sign_preserved"]


def test_harmonicity_probe():
    for probe in harmonicity_probe(w_a_profile(-1.0), 4):
        assert probe.spread < 1e-4


def test_rigidity():
    res = rigidity_check(RadialProfile.analytic([Term("power", 0.7, p=0.0)]), 4)
    assert res.applies and res.passed
    assert not rigidity_check(w_a_profile(-1.0), 4).applies
