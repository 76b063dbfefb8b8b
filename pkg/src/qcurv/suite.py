"""The acceptance battery: eleven numbered criteria, each with its tolerance."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .averaging import claim2_ratio, rigidity_check, verify_shell_equality, verify_sign_preservation
from .core import DEFAULT_QUAD, QCurvError, QuadratureSpec, make_dim, to_jsonable
from .corpus import corpus, random_profiles
from .curvature import (calibration_constants, curvature_frames, paneitz_apply, pfaffian,
                        q4_general, q_curvature_lcf, q_density, sigma_k)
from .gbc import (f_lambda, gluing_invariance, levelset_identity, multi_end_total, total_q_detail,
                  verify_gbc_rn)
from .jets import Jet
from .kernels import greens_solve, kernel_II, decay_sups, offset_grids, rv_dot_limits, verify_lemma2
from .profiles import RadialProfile, SphericalField, Term, cylinder_profile, w_a_profile
from .radial import EndSpec, basis_decompose

FAMILY = (-1.0, -0.75, -0.5, -0.25, 0.0)
LEVELS = (0.3, 0.45, 0.6, 0.75, 0.9)


@dataclass
class SuiteConfig:
    seed: int = 0
    quad: QuadratureSpec = DEFAULT_QUAD
    random_count: int = 200
    workers: int = 1


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    seconds: float = 0.0
    error: str | None = None

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:>2}: {self.title} ({self.seconds:.2f} s)"

    def to_dict(self, timing=True):
        out = {"number": self.number, "title": self.title, "passed": bool(self.passed),
               "metrics": to_jsonable(self.metrics), "error": self.error}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


# -- criteria ----------------------------------------------------------------

def c1_constants(cfg: SuiteConfig):
    c2, c4 = make_dim(2).c_n, make_dim(4).c_n
    e2, e4 = abs(c2 * 2 * pi - 1), abs(c4 * 8 * pi**2 - 1)
    return e2 < 1e-12 and e4 < 1e-12, {"c2": c2, "c4": c4, "rel_err_c2": e2, "rel_err_c4": e4}


def c2_round_sphere(cfg: SuiteConfig):
    sphere = next(e.profile for e in corpus() if e.name == "round_sphere")
    tq = total_q_detail(sphere, 4, cfg.quad)
    ok = abs(tq.flux - 2) < 1e-3 and abs(tq.quadrature - 2) < 1e-3
    return ok, {"flux": tq.flux, "quadrature": tq.quadrature}


def c3_family(cfg: SuiteConfig):
    rows, ok = [], True
    for a in FAMILY:
        p = w_a_profile(a)
        tq = total_q_detail(p, 4, cfg.quad)
        rep = verify_gbc_rn(p, 4, cfg.quad)
        eq_here = a == -1.0
        row_ok = (abs(tq.value + a) < 1e-3 and rep.verdict == "satisfied"
                  and rep.equality_expected == eq_here and rep.equality_observed == eq_here)
        ok &= row_ok
        rows.append({"a": a, "total": tq.value, "verdict": rep.verdict,
                     "equality_expected": rep.equality_expected,
                     "equality_observed": rep.equality_observed})
    return ok, {"rows": rows}


def c4_random(cfg: SuiteConfig):
    profiles = random_profiles(cfg.random_count, cfg.seed, 4, cfg.quad)
    totals, verdicts = [], {}
    for p in profiles:
        rep = verify_gbc_rn(p, 4, cfg.quad)
        totals.append(rep.total)
        verdicts[rep.verdict] = verdicts.get(rep.verdict, 0) + 1
    ok = max(totals) <= 1 + 1e-3 and verdicts.get("violated", 0) == 0
    return ok, {"count": len(profiles), "max_total": max(totals), "min_total": min(totals),
                "verdicts": verdicts, "seed": cfg.seed}


def c5_multi_end(cfg: SuiteConfig):
    cyl = cylinder_profile()
    rep = multi_end_total([EndSpec("infinity", cyl), EndSpec("origin", cyl)], dim=4, quad=cfg.quad)
    ok = (abs(rep.total) < 1e-3 and rep.bound == 0.0 and rep.verdict == "satisfied"
          and rep.equality_expected and rep.equality_observed)
    return ok, {"total": rep.total, "bound": rep.bound, "verdict": rep.verdict,
                "equality_expected": rep.equality_expected,
                "equality_observed": rep.equality_observed,
                "contributions": rep.details["contributions"]}


def c6_kernels(cfg: SuiteConfig):
    r, s = offset_grids()
    R, S = np.meshgrid(r, s, indexing="ij")
    ii = kernel_II(R, S, 4, "quadrature", cfg.quad)
    ii_err = float(np.max(np.abs(ii - 1.0 / np.maximum(R, S) ** 2)))
    structure = {}
    ok = ii_err < 1e-6
    for n in (2, 4, 6):
        try:
            rep = verify_lemma2(n, r, s, cfg.quad, tol=1e-6)
            structure[n] = {"residual": rep.residual, "C": rep.C, "poly": rep.poly}
        except QCurvError as exc:
            structure[n] = {"error": str(exc)}
            ok = False
    src = lambda x: q_density(w_a_profile(-1.0), 4, x)  # noqa: E731
    sups = decay_sups(src, 4, cfg.quad)
    ok &= bool(sups.stable)
    return ok, {"max_II_error": ii_err, "structure": structure, "decay_sups": sups.to_dict()}


def c7_greens(cfg: SuiteConfig):
    rows, ok = [], True
    for a in (-1.0, -0.5):
        p = w_a_profile(a)
        src = lambda x, p=p: q_density(p, 4, x)  # noqa: E731
        sol = greens_solve(src, 4, cfg.quad)
        r = np.concatenate([[0.0], np.geomspace(1e-3, cfg.quad.r_max, 300)])
        err = float(np.max(np.abs(sol(r) - (p(r) - p(np.array([0.0]))[0]))))
        lim = rv_dot_limits(src, 4, cfg.quad, solution=sol)
        row_ok = (err < 10 * cfg.quad.eps_quad and abs(lim.origin) < 1e-3
                  and abs(lim.infinity - a) < 1e-3)
        ok &= row_ok
        rows.append({"a": a, "sup_error": err, "limits": lim.as_tuple()})
    return ok, {"rows": rows}


def c8_curvature(cfg: SuiteConfig):
    r = np.geomspace(0.05, 20.0, 25)
    cal = calibration_constants()
    q_err, pan_err, sig_err, pf_err = 0.0, 0.0, 0.0, 0.0
    tests = {"gauss": lambda x: (-(x * x)).exp(),
             "log": lambda x: (1.0 + x * x).log()}
    for e in corpus():
        p = e.profile
        qg, ql = q4_general(p, 4, r), q_curvature_lcf(p, 4, r)
        big = np.abs(ql) > 1e-3
        q_err = max(q_err, float(np.max(np.abs(qg - ql)[big] / np.abs(ql[big]), initial=0.0)))
        if np.any(~big) and np.max(np.abs(qg - ql)[~big]) >= 1e-6:
            q_err = max(q_err, 1.0)
        w = p(r)
        for fn in tests.values():
            F = fn(Jet.variable(r, 4))
            u = F
            for _ in range(2):
                du = u.deriv()
                u = du.deriv() + 3 * du.div_r()
            ref = np.exp(-4 * w) * u.value
            got = paneitz_apply(fn, p, 4, r)
            pan_err = max(pan_err, float(np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1e-3))))
        for fr in curvature_frames(p, 4, r, cal):
            sig_err = max(sig_err, abs(sigma_k(fr, 1) - fr.J))
            routes = [pfaffian(fr, 4, v, cal) for v in ("sigma_route", "faf1_route", "div4_route")]
            pf_err = max(pf_err, (max(routes) - min(routes)) / (1 + abs(sigma_k(fr, 2))))
    ok = q_err < 1e-5 and pan_err < 1e-5 and sig_err < 1e-9 and pf_err < 1e-5
    return ok, {"q4_rel_err": q_err, "paneitz_rel_err": pan_err, "sigma1_minus_J": sig_err,
                "pfaffian_spread": pf_err, "kappa4_over_c4": cal.ratio_to_cn(4),
                "div4_calib": cal.div4_calib, "calibration": cal.to_dict()}


def _field(n, eps, harmonic, base=None):
    base = w_a_profile(-1.0) if base is None else base
    r = np.geomspace(0.05, 50.0, 160)
    return SphericalField.from_profile(base, r, n, eps=eps, harmonic=harmonic)


def c9_averaging(cfg: SuiteConfig):
    shell, sign, ratio = {}, {}, {}
    ok = True
    for n in (2, 4, 6, 8):
        for harmonic in ("cos", "cos2"):
            fld = _field(n, 0.1, harmonic)
            defect = verify_shell_equality(fld)
            shell[f"n{n}_{harmonic}"] = defect
            ok &= defect < 10 * cfg.quad.eps_quad
            tail = claim2_ratio(fld).tail
            ratio[f"n{n}_{harmonic}"] = tail
            ok &= abs(tail - 1) < 1e-3
        small = _field(n, 0.001 if n == 2 else 0.01, "cos2")
        preserved = verify_sign_preservation(small)
        sign[f"n{n}"] = preserved
        ok &= preserved
    rigidity = {}
    for name, p in {"constant": RadialProfile.analytic([Term("power", 0.7, p=0.0)]),
                    "flat": RadialProfile.analytic([])}.items():
        res = rigidity_check(p, 4)
        rigidity[name] = {"applies": res.applies, "nonconstant_max": res.nonconstant_max}
        ok &= res.applies and res.passed
    return ok, {"shell_defects": shell, "sign_preserved": sign, "ratio_tail": ratio,
                "rigidity": rigidity}


def c10_levelsets(cfg: SuiteConfig):
    p = w_a_profile(-1.0)
    fs = {"1": lambda L: L**0, "lambda": lambda L: L, "lambda^2": lambda L: L**2}
    identity, frames, ok = {}, {}, True
    for name, f in fs.items():
        worst = 0.0
        for lam in LEVELS:
            res = levelset_identity(p, f, lam)
            worst = max(worst, res.defect / (1 + abs(res.lhs)))
        identity[name] = worst
        ok &= worst < 1e-3
    for lam in LEVELS:
        fr = f_lambda(p, lam)
        frames[str(lam)] = {"lam_dF": fr.lam_dF, "kappa_sigma2": fr.kappa * fr.sigma2,
                            "rel_defect": fr.defect}
        ok &= fr.defect < 1e-3
    return ok, {"identity_rel_defect": identity, "F_derivative": frames}


def c11_gluing(cfg: SuiteConfig):
    defects, ok = {}, True
    for e in corpus():
        for n in (2, 4, 6, 8):
            dv = gluing_invariance(e.profile, dim=n)
            defects[f"{e.name}/n{n}"] = dv
            ok &= dv < 10 * cfg.quad.eps_quad
    worst = max(defects, key=defects.get)
    return ok, {"max_defect": defects[worst], "worst": worst, "defects": defects}


CRITERIA = (
    (1, "normalization constants c2 and c4", c1_constants),
    (2, "round-sphere total Q equals 2", c2_round_sphere),
    (3, "total Q of the w_a family and equality at a = -1", c3_family),
    (4, "randomized inequality sweep", c4_random),
    (5, "two-ended cylinder total 0 with equality", c5_multi_end),
    (6, "kernel structure and decay sups", c6_kernels),
    (7, "Green's solver and r v' limits", c7_greens),
    (8, "curvature consistency and calibration", c8_curvature),
    (9, "spherical averaging", c9_averaging),
    (10, "level-set identities in dimension 4", c10_levelsets),
    (11, "gluing invariance", c11_gluing),
)


def run_criterion(number, cfg: SuiteConfig | None = None) -> CriterionResult:
    cfg = SuiteConfig() if cfg is None else cfg
    _, title, fn = CRITERIA[number - 1]
    start = time.perf_counter()
    try:
        passed, metrics = fn(cfg)
        err = None
    except QCurvError as exc:
        passed, metrics, err = False, {}, f"{type(exc).__name__}: {exc}"
    return CriterionResult(number, title, bool(passed), metrics, time.perf_counter() - start, err)


def run_suite(cfg: SuiteConfig | None = None, numbers=None):
    cfg = SuiteConfig() if cfg is None else cfg
    numbers = [c[0] for c in CRITERIA] if numbers is None else numbers
    if cfg.workers <= 1:
        return [run_criterion(k, cfg) for k in numbers]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(lambda k: run_criterion(k, cfg), numbers))


def unique_check(p: RadialProfile, dim, quad: QuadratureSpec = DEFAULT_QUAD):
    """Coefficients of ``w - v`` on the polyharmonic basis, ``v`` the Green's
    representation of ``(-Delta)^m w``; only the constant may survive."""
    d = make_dim(dim)
    sol = greens_solve(lambda x: q_density(p, d, x), d, quad)
    r = np.geomspace(0.1, quad.r_max / 2, 8 * d.n)
    return basis_decompose(r, p(r) - sol(r), d, rtol=1e-4)

