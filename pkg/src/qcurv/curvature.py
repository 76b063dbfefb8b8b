"""Pointwise curvature of ``g = exp(2w) g0`` for radial ``w``.

Tensors are assembled at the point ``(r, 0, ..., 0)``; there the flat
Hessian of a radial function is ``diag(w'', w'/r, ..., w'/r)`` and its
gradient is ``(w', 0, ..., 0)``. Matrices are returned in flat components.

Sign convention: ``Q = exp(-n w) (-Delta)^m w``. For even ``m`` this is
``exp(-n w) Delta^m w``; for ``n = 2`` it makes ``Q`` the Gaussian curvature.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .core import DimensionError, composite_gl, geometric_edges, make_dim
from .jets import TAIL_RADIUS, Jet, radial_laplacian
from .profiles import RadialProfile, as_jet_function, round_sphere_profile

VARIANTS = ("sigma_route", "faf1_route", "div4_route")


# -- jet-level operators ---------------------------------------------------

SPARE_ORDER = 12


def jet_order(p, r, order):
    """Order to expand at: spare terms near the origin keep quotients by r accurate."""
    smooth = p.even_analytic if isinstance(p, RadialProfile) else callable(p)
    r = np.asarray(r)
    if smooth and np.any((r > 0) & (r < TAIL_RADIUS)):
        return order + SPARE_ORDER
    return order


def profile_jet(p, r, order) -> Jet:
    if isinstance(p, RadialProfile):
        return p.jet(r, order)
    return p(Jet.variable(r, order))


def delta_power_jet(u: Jet, n: int, k: int) -> Jet:
    for _ in range(k):
        u = radial_laplacian(u, n)
    return u


def paneitz_power_jet(u: Jet, n: int) -> Jet:
    """``(-Delta)^m u``."""
    m = n // 2
    return delta_power_jet(u, n, m) * (-1.0) ** m


def curved_laplacian_jet(u: Jet, w: Jet, n: int) -> Jet:
    """``exp(-2w) (Delta u + (n-2) w' u')``."""
    du = u.deriv()
    return (-2.0 * w).exp() * (radial_laplacian(u, n) + (n - 2) * w.deriv() * du)


def scalar_curvature_jet(w: Jet, n: int) -> Jet:
    dw = w.deriv()
    return -2.0 * (n - 1) * (-2.0 * w).exp() * (radial_laplacian(w, n) + 0.5 * (n - 2) * dw * dw)


def ricci_rr_jet(w: Jet, n: int) -> Jet:
    """Flat ``Ric_rr``; the gradient terms cancel in the radial direction."""
    return (2 - n) * w.deriv().deriv() - radial_laplacian(w, n)


# -- pointwise data ----------------------------------------------------------

@dataclass(frozen=True)
class RadialCurvature:
    """Vectorized radial curvature data; arrays share the shape of ``r``."""

    n: int
    r: np.ndarray
    w: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    w1_over_r: np.ndarray
    lap: np.ndarray
    R: np.ndarray
    ric_rr: np.ndarray
    ric_tt: np.ndarray
    a_rr: np.ndarray
    a_tt: np.ndarray
    J: np.ndarray
    Q: np.ndarray
    lap_g_J: np.ndarray
    div4: np.ndarray

    def sigma(self, k):
        """``sigma_k`` from the closed form for eigenvalues ``(a, b, ..., b)``."""
        n = self.n
        a = np.exp(-2 * self.w) * self.a_rr
        b = np.exp(-2 * self.w) * self.a_tt
        return comb(n - 1, k) * b**k + a * comb(n - 1, k - 1) * b ** (k - 1)


def radial_curvature(p, dim, r) -> RadialCurvature:
    d = make_dim(dim)
    n = d.n
    r = np.asarray(r, dtype=float)
    if isinstance(p, RadialProfile):
        p.check_domain(r)
    W = profile_jet(p, r, jet_order(p, r, max(n, 4)))
    dW = W.deriv()
    lapW = radial_laplacian(W, n)
    w, w1, w2 = W.value, dW.value, dW.deriv().value
    w1r = dW.div_r().value
    lap = lapW.value
    Rj = scalar_curvature_jet(W, n)
    ric_rr = (2 - n) * w2 - lap
    ric_tt = (2 - n) * w1r - lap - (n - 2) * w1**2
    a_rr = -w2 + 0.5 * w1**2
    a_tt = -w1r - 0.5 * w1**2
    Jj = Rj / (2.0 * (n - 1))
    lap_g_J = curved_laplacian_jet(Jj, W, n).value
    Q = np.exp(-n * w) * q_density(p, d, r)
    hess_sq = w2**2 + (n - 1) * w1r**2
    div4 = np.exp(-4 * w) * (lap**2 - hess_sq + 2 * w2 * w1**2 + w1**2 * lap)
    return RadialCurvature(n, r, w, w1, w2, w1r, lap, Rj.value, ric_rr, ric_tt,
                           a_rr, a_tt, Jj.value, Q, lap_g_J, div4)


def _diag(first, rest, n):
    first = np.asarray(first, dtype=float)
    out = np.zeros(first.shape + (n, n))
    idx = np.arange(n)
    out[..., idx, idx] = np.asarray(rest)[..., None]
    out[..., 0, 0] = first
    return out


def scalar_curvature(p, dim, r):
    d = make_dim(dim)
    r = np.asarray(r, dtype=float)
    if isinstance(p, RadialProfile):
        p.check_domain(r)
    W = profile_jet(p, r, jet_order(p, r, 2))
    return scalar_curvature_jet(W, d.n).value


def ricci(p, dim, r):
    """Flat-component Ricci matrix, shape ``r.shape + (n, n)``."""
    rc = radial_curvature(p, dim, r)
    return _diag(rc.ric_rr, rc.ric_tt, rc.n)


def schouten(p, dim, r):
    """Flat-component Schouten matrix, shape ``r.shape + (n, n)``."""
    rc = radial_curvature(p, dim, r)
    return _diag(rc.a_rr, rc.a_tt, rc.n)


def q_curvature_lcf(p, dim, r):
    d = make_dim(dim)
    r = np.asarray(r, dtype=float)
    w = p(r) if isinstance(p, RadialProfile) else profile_jet(p, r, 0).value
    return np.exp(-d.n * w) * q_density(p, d, r)


def q_density(p, dim, r):
    """``Q exp(n w) = (-Delta)^m w``, the flat-volume density of ``Q dv_g``."""
    d = make_dim(dim)
    r = np.asarray(r, dtype=float)
    if isinstance(p, RadialProfile):
        return (-1.0) ** d.m * p.delta_power(r, d.n, d.m)
    return paneitz_power_jet(profile_jet(p, r, jet_order(p, r, d.n)), d.n).value


def q4_general(p, dim, r):
    """``(-3 |Ric|_g^2 + R^2 - Delta_g R) / 6`` from the Riemannian formula (n = 4)."""
    d = make_dim(dim)
    if d.n != 4:
        raise DimensionError("q4_general is defined for n = 4 only")
    r = np.asarray(r, dtype=float)
    if isinstance(p, RadialProfile):
        p.check_domain(r)
    W = profile_jet(p, r, jet_order(p, r, 4))
    Rj = scalar_curvature_jet(W, 4)
    rc_rr = ricci_rr_jet(W, 4).value
    dw = W.deriv()
    rc_tt = (-2.0 * dw.div_r() - radial_laplacian(W, 4) - 2.0 * dw * dw).value
    ric_sq = np.exp(-4 * W.value) * (rc_rr**2 + 3 * rc_tt**2)
    lap_g_R = curved_laplacian_jet(Rj, W, 4).value
    return (-3.0 * ric_sq + Rj.value**2 - lap_g_R) / 6.0


def curved_laplacian(u, p, dim, r):
    """``Delta_g u`` for a radial ``u`` (profile, jet callable or constant)."""
    d = make_dim(dim)
    r = np.asarray(r, dtype=float)
    if isinstance(p, RadialProfile):
        p.check_domain(r)
    order = jet_order(p, r, 2)
    W = profile_jet(p, r, order)
    U = as_jet_function(u, order)(Jet.variable(r, order))
    return curved_laplacian_jet(U, W, d.n).value


def paneitz_apply(f, p, dim, r):
    """``P_4 f = Delta_g^2 f + delta((2/3) R g - 2 Ric) df`` with ``delta = -div_g``."""
    d = make_dim(dim)
    if d.n != 4:
        raise DimensionError("paneitz_apply is defined for n = 4 only")
    r = np.asarray(r, dtype=float)
    if isinstance(p, RadialProfile):
        p.check_domain(r)
    order = jet_order(p, r, 4)
    W = profile_jet(p, r, order)
    F = as_jet_function(f, order)(Jet.variable(r, order))
    lap2 = curved_laplacian_jet(curved_laplacian_jet(F, W, 4), W, 4)
    t_rr = (2.0 / 3.0) * scalar_curvature_jet(W, 4) * (2.0 * W).exp() - 2.0 * ricci_rr_jet(W, 4)
    h = t_rr * F.deriv().truncate(t_rr.order)
    div = np.exp(-4.0 * W.value) * (h.deriv() + 3.0 * h.div_r()).value
    return lap2.value - div


# -- frames --------------------------------------------------------------

@dataclass(frozen=True)
class CurvatureFrame:
    n: int
    r: float
    w: float
    grad: tuple
    hess: tuple
    lap: float
    R: float
    ric: tuple
    A: tuple
    J: float
    eig: tuple
    sigma: tuple
    Q: float
    lap_g_J: float
    div4_flat: float
    pfaff_sigma: float
    pfaff_div4: float | None

    def to_dict(self):
        return asdict(self)


def _tolist(a):
    return np.asarray(a, dtype=float).tolist()


def _elementary(eig, k):
    coeffs = np.poly(np.asarray(eig, dtype=float))
    return float((-1) ** k * coeffs[k])


def curvature_frames(p, dim, r, calibration=None):
    d = make_dim(dim)
    n, m = d.n, d.m
    r = np.atleast_1d(np.asarray(r, dtype=float))
    rc = radial_curvature(p, d, r)
    cal = calibration or calibration_constants()
    frames = []
    for i in range(len(r)):
        hess = _diag(rc.w2[i], rc.w1_over_r[i], n)
        grad = np.zeros(n)
        grad[0] = rc.w1[i]
        A = _diag(rc.a_rr[i], rc.a_tt[i], n)
        eig = np.linalg.eigvalsh(np.exp(-2 * rc.w[i]) * A)
        sig = tuple(_elementary(eig, k) for k in range(1, m + 1))
        div4 = d.c_n * cal.div4_calib * rc.div4[i] if n == 4 else None
        frames.append(CurvatureFrame(
            n=n, r=float(r[i]), w=float(rc.w[i]), grad=tuple(grad), hess=_tolist(hess),
            lap=float(rc.lap[i]), R=float(rc.R[i]),
            ric=_tolist(_diag(rc.ric_rr[i], rc.ric_tt[i], n)), A=_tolist(A),
            J=float(rc.J[i]), eig=tuple(eig.tolist()), sigma=sig, Q=float(rc.Q[i]),
            lap_g_J=float(rc.lap_g_J[i]), div4_flat=float(rc.div4[i]),
            pfaff_sigma=cal.kappa(n) * sig[m - 1],
            pfaff_div4=None if div4 is None else float(div4)))
    return frames


def curvature_frame(p, dim, r, calibration=None) -> CurvatureFrame:
    return curvature_frames(p, dim, [float(r)], calibration)[0]


def sigma_k(frame: CurvatureFrame, k: int) -> float:
    if not 1 <= k <= frame.n:
        raise IndexError(f"sigma_k needs 1 <= k <= {frame.n}, got {k}")
    return _elementary(frame.eig, k)


def pfaffian(frame: CurvatureFrame, dim, variant="sigma_route", calibration=None) -> float:
    d = make_dim(dim)
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if frame.n != d.n:
        raise DimensionError("frame dimension does not match dim")
    cal = calibration or calibration_constants()
    if variant == "sigma_route":
        return cal.kappa(d.n) * sigma_k(frame, d.m)
    if d.n != 4:
        raise DimensionError(f"{variant} is defined for n = 4 only")
    if variant == "faf1_route":
        return d.c_n * (frame.Q + frame.lap_g_J)
    return d.c_n * cal.div4_calib * frame.div4_flat


# -- calibration ---------------------------------------------------------

def radial_volume_integral(fn, dim, r_max=np.inf, per_decade=4, nodes=24):
    """``|S^{n-1}| int_0^{r_max} fn(r) r^{n-1} dr`` by composite Gauss-Legendre.

    ``r_max = inf`` truncates at ``1e6``; callers pass integrands decaying
    fast enough for the truncation to be negligible.
    """
    d = make_dim(dim)
    hi = 1e6 if np.isinf(r_max) else r_max
    edges = geometric_edges(min(1e-3, hi / 10), hi, per_decade)
    val, err = composite_gl(lambda s: fn(s) * s ** (d.n - 1), edges, nodes)
    return d.sphere_volume * val, d.sphere_volume * err


@dataclass(frozen=True)
class Calibration:
    """Measured normalization constants.

    ``kappas[n]`` turns ``sigma_m`` into the Gauss-Bonnet integrand in
    dimension ``n``; ``div4_calib`` and ``kappa_div`` do the same for the
    flat divergence expressions in dimension four.
    """

    kappas: tuple
    div4_calib: float
    kappa_div: float

    def kappa(self, n):
        return dict(self.kappas)[n]

    def ratio_to_cn(self, n):
        return self.kappa(n) / make_dim(n).c_n

    def to_dict(self):
        return {"kappa_n": {str(n): k for n, k in self.kappas},
                "kappa_over_c_n": {str(n): self.ratio_to_cn(n) for n, _ in self.kappas},
                "div4_calib": self.div4_calib, "kappa_div": self.kappa_div}


@lru_cache(maxsize=None)
def calibration_constants() -> Calibration:
    """Measure the constants on the round sphere, where every Gauss-Bonnet
    integral must equal ``chi(S^n) = 2``."""
    sphere = round_sphere_profile()
    kappas = []
    for n in (2, 4, 6, 8):
        d = make_dim(n)
        q_int, _ = radial_volume_integral(
            lambda s: (rc := radial_curvature(sphere, d, s)).Q * np.exp(n * rc.w), d)
        s_int, _ = radial_volume_integral(
            lambda s: (rc := radial_curvature(sphere, d, s)).sigma(d.m) * np.exp(n * rc.w), d)
        kappas.append((n, d.c_n * q_int / s_int))
    d4 = make_dim(4)
    q4, _ = radial_volume_integral(
        lambda s: (rc := radial_curvature(sphere, d4, s)).Q * np.exp(4 * rc.w), d4)
    flat4, _ = radial_volume_integral(
        lambda s: (rc := radial_curvature(sphere, d4, s)).div4 * np.exp(4 * rc.w), d4)
    # divergence form on the unit ball
    rho = 1.0
    s2, _ = radial_volume_integral(
        lambda s: (rc := radial_curvature(sphere, d4, s)).sigma(2) * np.exp(4 * rc.w), d4, rho)
    rc = radial_curvature(sphere, d4, np.array([rho]))
    flux = d4.sphere_volume * rho**3 * rc.w1[0] * (rc.lap[0] + rc.w1[0] ** 2 - rc.w2[0])
    return Calibration(tuple(kappas), q4 / flat4, float(flux / s2))
