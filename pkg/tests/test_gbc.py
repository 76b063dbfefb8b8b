import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcurv.core import (DEFAULT_QUAD, CutoffError, DecompositionError, DomainError, LevelSetError)
from qcurv.corpus import corpus
from qcurv.gbc import (Cutoff, check_hypotheses, f_lambda, gluing_invariance, levelset_identity,
                       multi_end_total, total_q, total_q_detail, verify_gbc_rn)
from qcurv.profiles import RadialProfile, Term, w_a_profile
from qcurv.radial import EndSpec

EPS = DEFAULT_QUAD.eps_quad


def test_total_q_examples(flat, sphere):
    assert total_q(flat, 4) == pytest.approx(0.0, abs=1e-12)
    assert total_q(sphere, 4) == pytest.approx(2.0, abs=1e-3)


@given(st.floats(-2.0, 0.0))
@settings(max_examples=15)
def test_total_q_w_a(a):
    assert total_q(w_a_profile(a), 4) == pytest.approx(-a, abs=1e-3)


def test_flux_and_quadrature_agree():
    for e in corpus():
        if e.profile.punctured_origin:
            continue
        tq = total_q_detail(e.profile, 4)
        assert abs(tq.flux - tq.quadrature) < 10 * EPS


@pytest.mark.parametrize("n", [2, 6, 8])
def test_total_q_sphere_other_dims(n):
    from qcurv.profiles import round_sphere_profile
    assert total_q(round_sphere_profile(n), n) == pytest.approx(2.0, abs=1e-3)


def test_verify_gbc_examples(sphere):
    rep = verify_gbc_rn(w_a_profile(-1.0), 4)
    assert rep.total == pytest.approx(1.0, abs=1e-3)
    assert rep.verdict == "satisfied" and rep.equality_expected and rep.equality_observed
    rep = verify_gbc_rn(w_a_profile(-0.5), 4)
    assert rep.total == pytest.approx(0.5, abs=1e-3)
    assert rep.verdict == "satisfied" and not rep.equality_expected
    rep = verify_gbc_rn(sphere, 4)
    assert rep.verdict == "hypotheses-not-met" and not rep.A1


def test_multi_end_cylinder(cylinder):
    rep = multi_end_total([EndSpec("infinity", cylinder), EndSpec("origin", cylinder)], dim=4)
    assert rep.total == pytest.approx(0.0, abs=1e-3) and rep.bound == 0.0
    assert rep.verdict == "satisfied" and rep.equality_expected and rep.equality_observed


@pytest.mark.parametrize("a", [-1.0, -0.5, 0.0])
def test_multi_end_single(a):
    rep = multi_end_total([EndSpec("infinity", w_a_profile(a))], dim=4)
    assert rep.total == pytest.approx(-a, abs=1e-3) and rep.bound == 1.0
    assert rep.verdict == "satisfied"


def test_multi_end_puncture_additivity():
    p = RadialProfile.analytic([Term("log", -2.0), Term("log1p_sq", 0.5)], punctured_origin=True)
    rep = multi_end_total([EndSpec("infinity", p), EndSpec("origin", p)], dim=4)
    assert rep.details["contributions"]["origin"] == pytest.approx(-2.0, abs=1e-3)
    assert rep.total == pytest.approx(-1.0, abs=1e-3)
    assert rep.verdict == "satisfied"


def test_multi_end_rejects_overlap(cylinder):
    with pytest.raises(DecompositionError):
        multi_end_total([EndSpec("infinity", cylinder, support=(1.0, 2.0)),
                         EndSpec("origin", cylinder, support=(0.5, 1.5))], dim=4)
    with pytest.raises(DecompositionError):
        multi_end_total([EndSpec("origin", cylinder)], dim=4)


def test_gluing_cylinder_exact(cylinder):
    for n in (2, 4, 6, 8):
        assert gluing_invariance(cylinder, dim=n) == 0.0


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_gluing_w_minus_one(n, w_minus_one):
    assert gluing_invariance(w_minus_one, dim=n) < 10 * EPS


def test_cutoff_must_be_compact():
    with pytest.raises(CutoffError):
        Cutoff(inner=1.0, plateau=(2.0, 3.0), outer=np.inf)
    with pytest.raises(CutoffError):
        Cutoff(inner=0.5)
    with pytest.raises(CutoffError):
        gluing_invariance(w_a_profile(-1.0), cutoff=lambda x: x)


@pytest.mark.parametrize("lam", [0.3, 0.5, 0.9])
def test_levelset_constant_f(lam, w_minus_one):
    res = levelset_identity(w_minus_one, lambda L: L**0, lam)
    assert abs(res.lhs) < 1e-10 and abs(res.rhs) < 1e-8


@pytest.mark.parametrize(("power", "lam"), [(1, 0.5), (2, 0.7)])
def test_levelset_examples(power, lam, w_minus_one):
    res = levelset_identity(w_minus_one, lambda L: L**power, lam)
    assert res.defect < 1e-3 * (1 + abs(res.lhs))


def test_levelset_errors(flat, w_minus_one):
    with pytest.raises(LevelSetError):
        levelset_identity(flat, lambda L: L, 0.5)
    with pytest.raises(DomainError):
        levelset_identity(w_minus_one, lambda L: L, 1.5)
    with pytest.raises(LevelSetError):
        levelset_identity(w_minus_one, lambda L: L, 0.5, dim=6)


@pytest.mark.parametrize("lam", [0.5, 0.7])
def test_f_lambda_derivative(lam, w_minus_one):
    assert f_lambda(w_minus_one, lam).defect < 1e-3


def test_f_lambda_flat_and_cylinder(flat, cylinder):
    with pytest.raises(LevelSetError):
        f_lambda(flat, 0.5)
    with pytest.raises(LevelSetError):
        f_lambda(cylinder, 0.5)
    fr = f_lambda(cylinder, 0.5, inner=0.5)
    assert abs(fr.sigma2) < 1e-10
    assert fr.defect < 1e-3


def test_check_hypotheses(flat, sphere, w_minus_one):
    f = check_hypotheses(w_minus_one, 4, "A4")
    assert f.a123 and f.A4
    assert f.details["inf_R"] > 0
    f = check_hypotheses(flat, 4, "A4")
    assert f.A2 and f.A4 is False
    f = check_hypotheses(sphere, 4, "A4")
    assert f.A4 and not f.A1
