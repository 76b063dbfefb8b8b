"""Total Q-curvature, Gauss-Bonnet-Chern inequality checks and level-set identities."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy.optimize import brentq

from .core import (DEFAULT_QUAD, ConsistencyError, CutoffError, DecompositionError, DomainError,
                   IntegrabilityError, LevelSetError, LimitError, QCurvError, QuadratureSpec,
                   composite_gl, geometric_edges, make_dim, richardson_limit)
from .curvature import calibration_constants, radial_curvature, scalar_curvature_jet
from .jets import Jet, poly_step
from .profiles import RadialProfile
from .radial import completeness_check, equality_case_check, scalar_nonnegative

VERDICTS = ("satisfied", "violated", "hypotheses-not-met")
PANEL_NODES = 32
MP_DPS = 30
ROUNDOFF_FACTOR = 64  # long-double round-off of a panel sum, in units of eps * sum |terms|


# -- total Q ---------------------------------------------------------------

def _q_integrand(p: RadialProfile, d, r):
    """``(-Delta)^m w * r^{n-1}``."""
    return (-1.0) ** d.m * p.delta_power(r, d.n, d.m) * r ** (d.n - 1)


def _flux(p: RadialProfile, d, r):
    """``(-1)^m r^{n-1} (Delta^{m-1} w)'``, whose increments integrate the Q density."""
    return (-1.0) ** d.m * p.radial_flux(r, d.n, d.m - 1)


def _power_tail(fn, r, toward):
    """Remainder of ``int fn`` beyond ``r`` under a local power law.

    Returns ``(tail, exponent)``; raises :class:`IntegrabilityError` when the
    local exponent is not integrable.
    """
    ratio = 2.0 if toward == "infinity" else 0.5
    f0, f1 = float(fn(np.array([r]))[0]), float(fn(np.array([r * ratio]))[0])
    if f0 == 0.0 and f1 == 0.0:
        return 0.0, -np.inf
    if f0 == 0.0 or f0 * f1 <= 0.0:
        # sign change or isolated zero: fall back to the magnitude bound
        return abs(f0) + abs(f1), np.nan
    s = np.log(abs(f1 / f0)) / np.log(ratio)
    if toward == "infinity":
        if not s < -1.0:
            raise IntegrabilityError(f"integrand decays like r^{s:.3g} at infinity")
        return -f0 * r / (s + 1.0), s
    if not s > -1.0:
        raise IntegrabilityError(f"integrand blows up like r^{s:.3g} at the origin")
    return f0 * r / (s + 1.0), s


@dataclass(frozen=True)
class TotalQ:
    """Both routes to ``C_n int Q dv``; ``value`` is the flux route."""

    dim: int
    value: float
    flux: float
    quadrature: float
    flux_error: float
    quadrature_error: float
    tail: float

    def to_dict(self):
        return asdict(self)


def _limits(p: RadialProfile, d, quad: QuadratureSpec):
    """Flux at the outer end and, for a puncture, at the origin."""
    lo, hi = p.domain
    fn = lambda r: _flux(p, d, r)  # noqa: E731
    if np.isinf(hi):
        out = richardson_limit(fn, quad.r_max, "infinity", levels=8, order=quad.extrap_order)
        outer, outer_err = out.value, out.error
    else:
        outer = float(fn(np.array([hi]))[0])
        outer_err = abs(outer - float(fn(np.array([hi / 2]))[0]))
    inner, inner_err = 0.0, 0.0
    if p.punctured_origin:
        if lo > 0:
            inner = float(fn(np.array([lo]))[0])
            inner_err = abs(inner - float(fn(np.array([2 * lo]))[0]))
        else:
            lim = richardson_limit(fn, 1.0 / quad.r_max, "origin", levels=8, order=quad.extrap_order)
            inner, inner_err = lim.value, lim.error
    return outer, outer_err, inner, inner_err


def _quadrature_total(p: RadialProfile, d, quad: QuadratureSpec, extent=1e4):
    lo, hi = p.domain
    fn = lambda r: _q_integrand(p, d, r)  # noqa: E731
    top = quad.r_max * extent if np.isinf(hi) else hi
    bottom = max(lo, 1e-6) if p.punctured_origin else 0.0
    start = bottom if bottom > 0 else min(1e-3, top / 10)
    edges = geometric_edges(start, top, per_decade=6, include_zero=bottom == 0)
    val, err = composite_gl(fn, edges, quad.radial_nodes)
    tail = 0.0
    if np.isinf(hi):
        t, _ = _power_tail(fn, top, "infinity")
        tail += t
    if p.punctured_origin and lo == 0:
        t, _ = _power_tail(fn, bottom, "origin")
        tail += t
    return val + tail, err, abs(tail)


def total_q_detail(p: RadialProfile, dim, quad: QuadratureSpec = DEFAULT_QUAD) -> TotalQ:
    """``C_n int Q dv = C_n int (-Delta)^m w dx`` by flux limits and by quadrature.

    Raises :class:`ConsistencyError` when the routes differ by more than
    ``10 * eps_quad`` and :class:`IntegrabilityError` on a non-integrable tail.
    """
    d = make_dim(dim)
    if 2 * d.m > p.max_order:
        raise ValueError(f"profile carries {p.max_order} derivatives, dimension {d.n} needs {d.n}")
    scale = d.c_n * d.sphere_volume
    try:
        outer, outer_err, inner, inner_err = _limits(p, d, quad)
    except LimitError as exc:
        raise IntegrabilityError(str(exc)) from exc
    flux = scale * (outer - inner)
    qval, qerr, tail = _quadrature_total(p, d, quad)
    qval *= scale
    if not (np.isfinite(flux) and np.isfinite(qval)):
        raise IntegrabilityError("total Q is not finite")
    if abs(flux - qval) > 10 * quad.eps_quad:
        raise ConsistencyError(f"flux {flux:.10g} and quadrature {qval:.10g} disagree")
    return TotalQ(d.n, flux, flux, qval, scale * (outer_err + inner_err), scale * qerr, scale * tail)


def total_q(p: RadialProfile, dim, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``C_n int Q_g dv_g`` over ``R^n`` (minus the origin for a punctured profile)."""
    return total_q_detail(p, dim, quad).value


# -- hypotheses ----------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisFlags:
    A1: bool
    A2: bool
    A3: bool
    A4: bool | None = None
    details: dict = field(default_factory=dict)

    @property
    def a123(self):
        return self.A1 and self.A2 and self.A3

    def to_dict(self):
        return asdict(self)


def _ends(p: RadialProfile):
    return ["infinity"] + (["origin"] if p.punctured_origin else [])


def _near_end(p: RadialProfile, end, quad: QuadratureSpec, count=33):
    lo, hi = p.domain
    if end == "infinity":
        top = quad.r_max if np.isinf(hi) else hi
        return np.linspace(top / 2, top, count)
    bottom = 1.0 / quad.r_max if lo == 0 else lo
    return np.linspace(bottom, 2 * bottom, count)


def _bounded(values_by_extent, rel=0.01, floor=1e-6):
    """Whether a sup stays put as the scanned region grows."""
    a, b = values_by_extent
    return bool(np.isfinite(b) and b <= abs(a) * (1 + rel) + floor)


def _scan_a4(p: RadialProfile, d, quad: QuadratureSpec):
    """Grid extrema of ``R``, ``|grad_g R|_g`` and the least Ricci eigenvalue,
    each compared between a region and its fourfold enlargement."""
    lo, hi = p.domain
    top = quad.r_max if np.isinf(hi) else hi
    stats = []
    for extent in (top / 4, top):
        if p.punctured_origin:
            r = np.geomspace(max(lo, 1.0 / quad.r_max) * top / extent, extent, 400)
        else:
            r = np.concatenate([[0.0], np.geomspace(1e-3, extent, 400)])
        rc = radial_curvature(p, d, r)
        dR = scalar_curvature_jet(p.jet(r, 3), d.n).deriv().value
        grad = np.exp(-rc.w) * np.abs(dR)
        ric_min = np.exp(-2 * rc.w) * np.minimum(rc.ric_rr, rc.ric_tt)
        stats.append((float(rc.R.min()), float(rc.R.max()), float(grad.max()), float(ric_min.min())))
    (_, rmax0, g0, k0), (rmin1, rmax1, g1, k1) = stats
    flags = {"inf_R": rmin1, "sup_R": rmax1, "sup_grad_R": g1, "inf_ric": k1}
    ok = (rmin1 > 1e-8 * max(1.0, abs(rmax1))
          and _bounded((rmax0, rmax1)) and _bounded((g0, g1)) and _bounded((-k0, -k1)))
    return bool(ok), flags


def check_hypotheses(p: RadialProfile, dim, mode="A123", quad: QuadratureSpec = DEFAULT_QUAD):
    """Flags for completeness (A1), ``R >= 0`` near the ends (A2), an integrable
    Q tail (A3) and, in ``A4`` mode, the pinching conditions."""
    if mode not in ("A123", "A4"):
        raise ValueError("mode must be 'A123' or 'A4'")
    d = make_dim(dim)
    details = {}
    a1 = True
    for end in _ends(p):
        try:
            res = completeness_check(p, end)
            details[f"c1_{end}"] = res.c1
            a1 &= res.complete
        except QCurvError:
            a1 = False
    a2 = True
    for end in _ends(p):
        r = _near_end(p, end, quad)
        details[f"min_R_{end}"] = float(radial_curvature(p, d, r).R.min())
        a2 &= scalar_nonnegative(p, d, r)
    try:
        tq = total_q_detail(p, d, quad)
        details["total"] = tq.value
        a3 = tq.tail <= 10 * quad.eps_quad
    except (IntegrabilityError, ConsistencyError) as exc:
        details["A3_error"] = str(exc)
        a3 = False
    a4 = None
    if mode == "A4":
        a4, scan = _scan_a4(p, d, quad)
        details.update(scan)
    return HypothesisFlags(bool(a1), bool(a2), bool(a3), a4, details)


# -- GBC reports -------------------------------------------------------------------

@dataclass(frozen=True)
class GBCReport:
    dim: int
    total: float
    bound: float
    A1: bool
    A2: bool
    A3: bool
    A4: bool | None
    verdict: str
    equality_expected: bool
    equality_observed: bool
    tol: float
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _verdict(flags_ok, total, bound, tol):
    if not flags_ok:
        return "hypotheses-not-met"
    return "satisfied" if total <= bound + tol else "violated"


def verify_gbc_rn(p: RadialProfile, dim, quad: QuadratureSpec = DEFAULT_QUAD, tol=1e-3) -> GBCReport:
    """Check ``C_n int Q dv <= 1`` for a complete radial metric on ``R^n``."""
    d = make_dim(dim)
    flags = check_hypotheses(p, d, "A123", quad)
    total = flags.details.get("total", np.nan)
    expected = equality_case_check(p, d)
    observed = bool(np.isfinite(total) and abs(total - 1.0) < tol)
    verdict = _verdict(flags.a123, total, 1.0, tol)
    return GBCReport(d.n, float(total), 1.0, flags.A1, flags.A2, flags.A3, None, verdict,
                     expected, observed, tol, flags.details)


# -- several ends ------------------------------------------------------------------

DEFAULT_SUPPORTS = {"infinity": (1.0, 2.0), "origin": (0.25, 0.5)}


def _localizer(end, support):
    """``l(r)`` on jets: 1 at the end, 0 beyond ``support``, smooth across it."""
    a, b = support
    if end == "infinity":
        return lambda x: poly_step((x - a) / (b - a))
    return lambda x: 1.0 - poly_step((x - a) / (b - a))


def _jet_q_integrand(fn, d, r):
    """``(-Delta)^m fn * r^{n-1}`` for a jet callable ``fn``, in the precision of ``r``."""
    u = fn(Jet.variable(r, d.n))
    for _ in range(d.m):
        du = u.deriv()
        u = du.deriv() + (d.n - 1) * du.div_r()
    return (-1.0) ** d.m * u.value * r ** (d.n - 1)


def _gl_refine(x, nodes, steps):
    """Newton steps on the Legendre roots ``x``; returns nodes and weights."""
    for _ in range(steps):
        p0, p1 = x * 0 + 1, x
        for k in range(2, nodes + 1):
            p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
        dp = nodes * (x * p1 - p0) / (x * x - 1)
        x = x - p1 / dp
    return x, 2 / ((1 - x * x) * dp * dp)


@lru_cache(maxsize=None)
def _gl_extended(nodes):
    """Gauss-Legendre rule refined by Newton steps in long double."""
    x = np.polynomial.legendre.leggauss(nodes)[0].astype(np.longdouble)
    return _gl_refine(x, nodes, 3)


@lru_cache(maxsize=None)
def _gl_mp(nodes, dps):
    with mpmath.workdps(dps):
        x = np.array([mpmath.mpf(float(v)) for v in np.polynomial.legendre.leggauss(nodes)[0]],
                     dtype=object)
        return _gl_refine(x, nodes, 3)


def _panel_edges(knots, panels, one):
    """Panel edges aligned with ``knots``; ``one`` fixes the number type."""
    knots = sorted({float(k) for k in knots})
    return sorted({one * a + (one * b - one * a) * i / panels
                   for a, b in zip(knots[:-1], knots[1:]) for i in range(panels + 1)})


def _panel_sum(fn, d, edges, x, w):
    edges = np.array(edges, dtype=x.dtype)
    a, b = edges[:-1, None], edges[1:, None]
    pts = ((a + b) / 2 + (b - a) / 2 * x).ravel()
    terms = ((b - a) / 2 * w).ravel() * _jet_q_integrand(fn, d, pts)
    return np.sum(terms), np.sum(np.abs(terms))


def _band_integral(fn, d, knots, panels=4, nodes=PANEL_NODES, floor=None, mp_dps=MP_DPS):
    """``int (-Delta)^m fn * r^{n-1} dr`` with panels aligned to the cutoff knots.

    Cutoff derivatives of order ``n`` are large and their lobes cancel in the
    integral, so nodes, weights and jets all run in long double. When
    ``floor`` is given and the long-double round-off estimate exceeds it, the
    sum is redone in ``mp_dps``-digit arithmetic with half the nodes per panel.
    """
    x, w = _gl_extended(nodes)
    total, mass = _panel_sum(fn, d, _panel_edges(knots, panels, np.longdouble(1)), x, w)
    if floor is None or ROUNDOFF_FACTOR * np.finfo(np.longdouble).eps * mass <= floor:
        return float(total)
    with mpmath.workdps(mp_dps):
        x, w = _gl_mp(max(nodes // 2, 8), mp_dps)
        total, _ = _panel_sum(fn, d, _panel_edges(knots, max(panels // 2, 1), mpmath.mpf(1)), x, w)
        return float(total)


def _end_contribution(p, end, support, d, quad):
    """``C_n int (-Delta)^m (l w) dx`` by quadrature, and the flux bookkeeping value."""
    scale = d.c_n * d.sphere_volume
    a, b = support
    l = _localizer(end, support)
    w = lambda x: p.jet(x.value, x.order)  # noqa: E731
    band = _band_integral(lambda x: l(x) * w(x), d, (a, b))
    fn = lambda r: _q_integrand(p, d, r)  # noqa: E731
    if end == "infinity":
        top = quad.r_max * 1e4
        plateau, _ = composite_gl(fn, geometric_edges(b, top, 6, include_zero=False), quad.radial_nodes)
        plateau += _power_tail(fn, top, "infinity")[0]
        bookkeeping = richardson_limit(lambda r: _flux(p, d, r), quad.r_max, "infinity",
                                       order=quad.extrap_order).value
    else:
        bottom = 1e-6
        plateau, _ = composite_gl(fn, geometric_edges(bottom, a, 6, include_zero=False), quad.radial_nodes)
        plateau += _power_tail(fn, bottom, "origin")[0]
        bookkeeping = -richardson_limit(lambda r: _flux(p, d, r), 1.0 / quad.r_max, "origin",
                                        order=quad.extrap_order).value
    return scale * (band + plateau), scale * bookkeeping


def _same_near(p, q, r):
    return bool(np.allclose(p(r), q(r), rtol=1e-10, atol=1e-10))


def multi_end_total(ends, interior: RadialProfile | None = None, dim=4,
                    quad: QuadratureSpec = DEFAULT_QUAD, tol=1e-3) -> GBCReport:
    """``C_n int Q dv`` on ``R^n`` with an infinity end and an optional puncture at 0.

    The conformal factor ``w`` (``interior``, or the profile shared by the
    ends) is split as ``sum_i l_i w + (1 - sum_i l_i) w``, where each ``l_i``
    equals 1 near its end. Each localized piece contributes
    ``C_n int (-Delta)^m (l_i w) dx``; the compactly supported remainder
    contributes zero up to quadrature error.
    """
    d = make_dim(dim)
    ends = list(ends)
    if not ends:
        raise DecompositionError("at least one end is required")
    locs = [e.location for e in ends]
    if locs.count("infinity") != 1:
        raise DecompositionError("exactly one end must sit at infinity")
    if any(e.center != 0.0 for e in ends):
        raise DecompositionError("radial decompositions support punctures at the origin only")
    supports = {}
    for e in ends:
        s = tuple(e.support) if e.support is not None else DEFAULT_SUPPORTS[e.location]
        if not 0 < s[0] < s[1] < np.inf:
            raise DecompositionError(f"support {s} must satisfy 0 < a < b < inf")
        if e.location in supports:
            raise DecompositionError(f"overlapping supports: two ends at the {e.location}")
        supports[e.location] = s
    if "origin" in supports and supports["origin"][1] >= supports["infinity"][0]:
        raise DecompositionError(f"overlapping supports {supports['origin']} and {supports['infinity']}")
    w = interior if interior is not None else ends[0].profile
    if "origin" in supports and not w.punctured_origin:
        raise DecompositionError("a puncture needs a profile punctured at the origin")
    for e in ends:
        a, b = supports[e.location]
        probe = np.geomspace(b, 4 * b, 5) if e.location == "infinity" else np.geomspace(a / 4, a, 5)
        if e.profile is not w and not _same_near(e.profile, w, probe):
            raise DecompositionError(f"the {e.location} end profile disagrees with the interior")

    k = len(ends)
    bound = 2.0 - k if "origin" in supports else 1.0
    contributions, total = {}, 0.0
    for loc, s in supports.items():
        quadv, book = _end_contribution(w, loc, s, d, quad)
        if abs(quadv - book) > 10 * quad.eps_quad:
            raise ConsistencyError(f"{loc} end: quadrature {quadv:.10g} vs flux {book:.10g}")
        contributions[loc] = quadv
        total += quadv
    # compactly supported remainder between the localizers
    knots = [0.0, *supports["infinity"]] if "origin" not in supports else \
        [*supports["origin"], *supports["infinity"]]
    lin = _localizer("infinity", supports["infinity"])
    lor = _localizer("origin", supports["origin"]) if "origin" in supports else (lambda x: 0.0 * x)
    rest = lambda x: (1.0 - lin(x) - lor(x)) * w.jet(x.value, x.order)  # noqa: E731
    remainder = d.c_n * d.sphere_volume * _band_integral(rest, d, knots)
    total += remainder

    flags = check_hypotheses(w, d, "A123", quad)
    ends_ok = True
    for e in ends:
        c1 = flags.details.get(f"c1_{e.location}", np.nan)
        ends_ok &= bool(c1 >= -1.0 - tol) if e.location == "infinity" else bool(c1 <= -1.0 + tol)
    hyp_ok = flags.a123 and ends_ok
    details = {"contributions": contributions, "remainder": remainder,
               "supports": {k_: list(v) for k_, v in supports.items()}, **flags.details}
    return GBCReport(d.n, float(total), bound, flags.A1, flags.A2, flags.A3, None,
                     _verdict(hyp_ok, total, bound, tol), equality_case_check(w, d),
                     bool(abs(total - bound) < tol), tol, details)


# -- gluing -------------------------------------------------------------------------

@dataclass(frozen=True)
class Cutoff:
    """Smooth ``eta``: 1 on ``plateau``, 0 outside ``(inner, outer)``."""

    inner: float = 1.0
    plateau: tuple = (2.0, 3.0)
    outer: float = 4.0

    def __post_init__(self):
        lo, hi = self.plateau
        if not (np.isfinite(self.inner) and np.isfinite(self.outer)):
            raise CutoffError("cutoff must have compact support")
        if not 1.0 <= self.inner < lo <= hi < self.outer <= 4.0:
            raise CutoffError(f"cutoff support ({self.inner}, {self.outer}) with plateau "
                              f"{self.plateau} is not compactly inside (1, 4)")

    def __call__(self, x: Jet) -> Jet:
        lo, hi = self.plateau
        up = poly_step((x - self.inner) / (lo - self.inner))
        down = 1.0 - poly_step((x - hi) / (self.outer - hi))
        return up * down


def _analytic_jet(terms, x: Jet, sign=1.0, log_shift=0.0):
    """``sign * sum(terms) + log_shift * ln r`` by jet arithmetic in the precision of ``x``.

    Logarithmic terms are merged first, so exact cancellations stay exact.
    """
    log_c = log_shift + sign * sum(t.c for t in terms if t.kind == "log")
    out = Jet.constant(0.0, x.r0, x.order)
    if log_c != 0.0:
        out = out + log_c * x.log()
    for t in terms:
        if t.kind == "log1p_sq":
            out = out + (sign * t.c) * (1.0 + (x * (1.0 / t.rho)) ** 2).log()
        elif t.kind == "power":
            pw = x ** int(t.p) if float(t.p).is_integer() and t.p >= 0 else (t.p * x.log()).exp()
            out = out + (sign * t.c) * pw
    return out


def gluing_invariance(w_e: RadialProfile, cutoff: Cutoff | None = None, dim=4, panels=4,
                      floor=1e-8):
    """``|int Delta^m [eta (-w_e - ln r)] dx|`` over the cutoff annulus.

    The bracket is compactly supported, so the exact value is 0; the return
    value is the quadrature defect. Sums whose long-double round-off could
    exceed ``floor`` are recomputed in arbitrary precision.
    """
    d = make_dim(dim)
    cutoff = Cutoff() if cutoff is None else cutoff
    if not isinstance(cutoff, Cutoff):
        raise CutoffError("cutoff must be a Cutoff instance")

    if w_e.representation == "analytic":
        bracket = lambda x: _analytic_jet(w_e.terms, x, sign=-1.0, log_shift=-1.0)  # noqa: E731
    else:
        bracket = lambda x: -w_e.jet(x.value.astype(float), x.order) - x.log()  # noqa: E731

    def modifier(x):
        return cutoff(x) * bracket(x)

    val = _band_integral(modifier, d, (cutoff.inner, *cutoff.plateau, cutoff.outer), panels,
                         floor=floor / d.sphere_volume)
    return abs(d.sphere_volume * val)


# -- level sets (n = 4) -------------------------------------------------------------

def _level_check(p: RadialProfile, dim):
    d = make_dim(dim)
    if d.n != 4:
        raise LevelSetError("level-set identities are implemented for n = 4")
    lo, hi = p.domain
    start = 1e-3 if p.punctured_origin or lo > 0 else 0.0
    r = np.concatenate([[start] if start == 0 else [], np.geomspace(max(lo, 1e-3), min(hi, 1e4), 256)])
    w1 = p.derivative(r[r > 0], 1)
    if not np.all(w1 < 0):
        raise LevelSetError("e^w is not strictly decreasing in r; level sets are not balls")
    return d


def _level_radius(p: RadialProfile, lam):
    """Radius of the level sphere ``e^w = lam`` for decreasing ``w``."""
    lo, hi = p.domain
    t_lo = np.log(max(lo, 1e-12))
    t_hi = np.log(min(hi, 1e12))
    w = lambda t: float(p(np.array([np.exp(t)]))[0])  # noqa: E731
    w_top = w(t_lo) if p.punctured_origin else float(p(np.array([0.0]))[0])
    target = np.log(lam) if lam > 0 else -np.inf
    if not w(t_hi) < target < w_top:
        raise DomainError(f"level {lam} outside the range of e^w")
    if w(t_lo) <= target:
        return float(brentq(lambda r: float(p(np.array([r]))[0]) - target, 0.0, np.exp(t_lo),
                            xtol=1e-300, rtol=1e-15))
    return float(np.exp(brentq(lambda t: w(t) - target, t_lo, t_hi, xtol=1e-15, rtol=1e-15)))


def _ball(fn, r_lam, inner=0.0, nodes=PANEL_NODES):
    """``|S^3| int_inner^r fn(s) s^3 ds``."""
    s3 = 2.0 * np.pi**2
    if inner > 0:
        edges = geometric_edges(inner, r_lam, 12, include_zero=False)
    else:
        edges = geometric_edges(min(1e-2, r_lam / 10), r_lam, 12)
    val, _ = composite_gl(lambda s: fn(s) * s**3, edges, nodes)
    return s3 * val


def _lam_jet(p: RadialProfile, s, order=2):
    return p.jet(s, order).exp()


@dataclass(frozen=True)
class LevelSetIdentity:
    lam: float
    r: float
    lhs: float
    rhs: float
    rhs_printed: float
    defect: float

    def to_dict(self):
        return asdict(self)


def levelset_identity(p: RadialProfile, f, lam, dim=4, h_rel=1e-3) -> LevelSetIdentity:
    """Both sides of the level-set reduction for ``f = f(lambda)`` on ``U_lambda``.

    ``lhs = int_U Delta_g f dv_g``; ``rhs = -lambda d/dlambda Phi`` with
    ``Phi = int_U (Delta_g w) f dv_g - int_S (d_nu w) f dv'_g`` and ``nu`` the
    outward g-unit normal. ``rhs_printed`` is the same derivative without the
    leading minus sign. ``f`` must accept and return :class:`Jet` objects.
    """
    _level_check(p, dim)
    if p.punctured_origin:
        raise LevelSetError("U_lambda must be a ball; the profile is punctured")
    h = h_rel * lam
    r_lam = _level_radius(p, lam)
    for probe in (lam - h, lam + h):
        _level_radius(p, probe)

    def lap_g_f(s):
        W = p.jet(s, 2)
        F = f(W.exp())
        dF = F.deriv()
        lap = dF.deriv().value + 3 * dF.div_r().value
        return np.exp(2 * W.value) * (lap + 2 * W.deriv().value * dF.value)

    lhs = _ball(lap_g_f, r_lam)

    def phi(level):
        rl = _level_radius(p, level)

        def vol(s):
            W = p.jet(s, 2)
            dW = W.deriv()
            lap = dW.deriv().value + 3 * dW.div_r().value
            return np.exp(2 * W.value) * (lap + 2 * dW.value**2) * f(W.exp()).value

        W = p.jet(np.array([rl]), 1)
        Fv = f(W.exp()).value[0]
        boundary = 2 * np.pi**2 * rl**3 * np.exp(2 * W.value[0]) * W.deriv().value[0] * Fv
        return _ball(vol, rl) - boundary

    deriv = lam * (phi(lam + h) - phi(lam - h)) / (2 * h)
    rhs = -deriv
    return LevelSetIdentity(float(lam), r_lam, float(lhs), float(rhs), float(deriv), float(abs(lhs - rhs)))


@dataclass(frozen=True)
class LevelSetFrame:
    """``F(lambda)`` data on ``U_lambda = {e^w >= lambda}`` (a ball or, with
    ``inner > 0``, an annulus truncated at ``inner``)."""

    lam: float
    r: float
    inner: float
    volume: float
    flux: float
    F: float
    lam_dF: float
    sigma2: float
    sigma2_flux: float
    kappa: float
    sigma2_inner_flux: float = 0.0

    @property
    def defect(self):
        """Relative mismatch of ``lambda dF/dlambda`` and ``kappa int sigma_2 dv_g``.

        On a truncated region the divergence form of ``sigma_2`` leaves a flux
        through the inner sphere, which is added to the volume integral.
        """
        target = self.kappa * (self.sigma2 + self.sigma2_inner_flux)
        return abs(self.lam_dF - target) / max(abs(target), 1e-300)

    def to_dict(self):
        return {**asdict(self), "defect": self.defect}


def level_kappa(calibration=None):
    """Constant in ``lambda dF/dlambda = kappa int sigma_2 dv_g``: ``-2 kappa_div``."""
    cal = calibration_constants() if calibration is None else calibration
    return -2.0 * cal.kappa_div


def _F(p: RadialProfile, r_lam, inner):
    def vol(s):
        rc = radial_curvature(p, 4, s)
        g2 = rc.w1**2
        return (3 * rc.J * np.exp(2 * rc.w) + g2) * g2

    rc = radial_curvature(p, 4, np.array([r_lam]))
    flux = 2 * np.pi**2 * r_lam**3 * rc.w1[0] ** 3
    return _ball(vol, r_lam, inner), flux


def f_lambda(p: RadialProfile, lam, dim=4, inner=0.0, h_rel=1e-3, calibration=None) -> LevelSetFrame:
    """``F(lambda)`` with flat volume elements and its ``lambda``-derivative.

    ``sigma2`` is ``int sigma_2 dv_g`` over the region by quadrature;
    ``sigma2_flux`` is the same integral from its divergence form at the
    level sphere, which for a punctured profile also counts the origin.
    """
    _level_check(p, dim)
    if p.punctured_origin and not inner > 0:
        raise LevelSetError("a punctured profile needs a truncation radius inner > 0")
    h = h_rel * lam
    r_lam = _level_radius(p, lam)
    if not r_lam > inner:
        raise DomainError(f"level {lam} lies inside the truncation radius")
    vol, flux = _F(p, r_lam, inner)
    lo = _F(p, _level_radius(p, lam - h), inner)
    hi = _F(p, _level_radius(p, lam + h), inner)
    lam_dF = lam * (sum(hi) - sum(lo)) / (2 * h)

    def s2(s):
        rc = radial_curvature(p, 4, s)
        return rc.sigma(2) * np.exp(4 * rc.w)

    def sphere_flux(s):
        rc = radial_curvature(p, 4, np.array([s]))
        return float(np.pi**2 * s**3 * rc.w1[0] * (rc.lap[0] + rc.w1[0] ** 2 - rc.w2[0]))

    sig = _ball(s2, r_lam, inner)
    inner_flux = sphere_flux(inner) if inner > 0 else 0.0
    return LevelSetFrame(float(lam), r_lam, float(inner), float(vol), float(flux), float(vol + flux),
                         float(lam_dF), float(sig), sphere_flux(r_lam), level_kappa(calibration),
                         inner_flux)
