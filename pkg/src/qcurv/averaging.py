"""Spherical symmetrization of axisymmetric conformal factors.

Fields are expanded in Gegenbauer polynomials ``C_k^{(lambda)}(cos theta)``
with ``lambda = (n-2)/2`` (Chebyshev ``T_k`` when ``n = 2``). These are the
zonal spherical harmonics, so the flat Laplacian acts on mode ``k`` as
``u'' + (n-1) u'/r - k (k+n-2) u / r^2``. Radial derivatives come from
splines of each mode, extended to ``r < 0`` with parity ``(-1)^k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.special import eval_chebyt, eval_chebyu, eval_gegenbauer

from .core import (DEFAULT_QUAD, LimitError, PreconditionError, QuadratureSpec,
                   ResolutionError, make_dim, polar_rule)
from .curvature import q_curvature_lcf, q_density, scalar_curvature
from .jets import Jet
from .kernels import GreensSolution, greens_solve
from .profiles import RadialProfile, SphericalField
from .radial import basis_decompose

SPECTRAL_TAIL_TOL = 1e-9
ROUNDOFF_FLOOR = 1e-13


def _zonal(n, k, t):
    if n == 2:
        return eval_chebyt(k, t)
    return eval_gegenbauer(k, (n - 2) / 2.0, t)


def _zonal_dt(n, k, t):
    if k == 0:
        return np.zeros_like(t)
    if n == 2:
        return k * eval_chebyu(k - 1, t)
    lam = (n - 2) / 2.0
    return 2.0 * lam * eval_gegenbauer(k - 1, lam + 1.0, t)


def _spline_degree(n):
    return n + 3


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Zonal-mode expansion ``w(r, t) = sum_k a_k(r) C_k(t)`` of a :class:`SphericalField`."""

    field: SphericalField
    coeffs: np.ndarray  # (len(r), K)
    basis: np.ndarray  # (K, len(t))
    basis_dt: np.ndarray
    _splines: list = dc_field(default_factory=list, repr=False)

    @property
    def n(self):
        return self.field.n

    @classmethod
    def from_field(cls, fld: SphericalField):
        n = fld.n
        K = len(fld.t)
        basis = np.stack([_zonal(n, k, fld.t) for k in range(K)])
        basis_dt = np.stack([_zonal_dt(n, k, fld.t) for k in range(K)])
        norms = (basis**2) @ fld.weights
        coeffs = (fld.values * fld.weights[None, :]) @ basis.T / norms[None, :]
        # round-off in high modes is amplified by (k (k+n-2) / r^2)^m under Delta^m
        floor = ROUNDOFF_FLOOR * max(float(np.max(np.abs(coeffs))), 1e-300)
        modal = np.max(np.abs(coeffs), axis=0)
        coeffs[:, modal < floor] = 0.0
        # mode 0 is the spherical mean; share its bits with spherical_symmetrize
        coeffs[:, 0] = fld.values @ fld.weights
        sf = cls(fld, coeffs, basis, basis_dt)
        r = fld.r
        start = 1 if r[0] == 0 else 0
        x = np.concatenate([-r[start:][::-1], r])
        for k in range(K):
            a = coeffs[:, k]
            y = np.concatenate([(-1) ** k * a[start:][::-1], a])
            sf._splines.append(make_interp_spline(x, y, k=_spline_degree(n)))
        return sf

    def spectral_tail(self):
        """Largest coefficient among the two top modes relative to the largest overall."""
        scale = max(float(np.max(np.abs(self.coeffs))), 1e-300)
        return float(np.max(np.abs(self.coeffs[:, -2:]))) / scale

    def mode_jet(self, k, r, order):
        s = self._splines[k]
        derivs = np.stack([s(r, nu=j) for j in range(order + 1)])
        return Jet.from_derivatives(derivs, r)

    def delta_power_modes(self, r, p):
        """``(Delta^p w)`` mode coefficients at radii ``r > 0``, shape ``(len(r), K)``."""
        n = self.n
        out = np.zeros((len(r), self.coeffs.shape[1]))
        for k in range(self.coeffs.shape[1]):
            u = self.mode_jet(k, r, 2 * p)
            lam = k * (k + n - 2)
            for _ in range(p):
                du = u.deriv()
                u2 = du.deriv()
                u = u2 + (n - 1) * du.div_r() - lam * u.div_r().div_r()
            out[:, k] = u.value
        return out

    def synthesize(self, modes):
        return modes @ self.basis

    def gradient_sq(self, r):
        """``|grad w|^2 = w_r^2 + (1 - t^2) w_t^2 / r^2`` at ``(r_i, t_j)``."""
        K = self.coeffs.shape[1]
        dr = np.stack([self._splines[k](r, nu=1) for k in range(K)], axis=1) @ self.basis
        a = np.stack([self._splines[k](r) for k in range(K)], axis=1)
        dt = a @ self.basis_dt
        t = self.field.t[None, :]
        return dr**2 + (1.0 - t**2) * dt**2 / r[:, None] ** 2


def _check_resolution(sf: SpectralField):
    tail = sf.spectral_tail()
    if tail > SPECTRAL_TAIL_TOL:
        raise ResolutionError(f"angular modes not resolved (top-mode ratio {tail:.2g}); "
                              "increase the number of polar nodes")
    if len(sf.field.r) < 4 * (_spline_degree(sf.n) + 1):
        raise ResolutionError("radial grid too coarse for the required derivatives")


def spherical_symmetrize(fld: SphericalField) -> RadialProfile:
    """``w_bar(r_i)``: the polar-weighted mean of ``w(r_i, .)``."""
    wbar = fld.values @ fld.weights
    return RadialProfile.sampled(fld.r, wbar, max_order=max(fld.n, 4),
                                 degree=_spline_degree(fld.n), name="symmetrized")


def _interior(r, pad=4):
    pos = r[r > 0]
    return pos[pad:-pad] if len(pos) > 2 * pad + 2 else pos


def shell_integrals(fld: SphericalField, r=None):
    """``(int_{|x|=r} Delta^m w_bar, int_{|x|=r} Delta^m w)`` at interior radii."""
    d = make_dim(fld.n)
    sf = SpectralField.from_field(fld)
    _check_resolution(sf)
    r = _interior(fld.r) if r is None else np.asarray(r, dtype=float)
    area = d.sphere_volume * r ** (d.n - 1)
    wbar = spherical_symmetrize(fld)
    lhs = area * wbar.delta_power(r, d.n, d.m)
    full = sf.synthesize(sf.delta_power_modes(r, d.m))
    rhs = area * (full @ fld.weights)
    return r, lhs, rhs


def verify_shell_equality(fld: SphericalField, dim=None):
    """Max over interior radii of the shell-integral defect between ``w_bar`` and ``w``."""
    if dim is not None and make_dim(dim).n != fld.n:
        raise ValueError("field dimension does not match dim")
    _, lhs, rhs = shell_integrals(fld)
    return float(np.max(np.abs(lhs - rhs)))


def _gate_tol(lap):
    return 1e-9 * (1.0 + np.abs(lap))


def verify_sign_preservation(fld: SphericalField, dim=None):
    """Whether ``Delta w_bar + (m-1)|grad w_bar|^2 <= 0`` given the same for ``w``."""
    d = make_dim(fld.n if dim is None else dim)
    sf = SpectralField.from_field(fld)
    _check_resolution(sf)
    r = _interior(fld.r)
    lap = sf.synthesize(sf.delta_power_modes(r, 1))
    gate = lap + (d.m - 1) * sf.gradient_sq(r)
    if np.any(gate > _gate_tol(lap)):
        raise PreconditionError("input violates Delta w + (m-1)|grad w|^2 <= 0")
    wbar = spherical_symmetrize(fld)
    W = wbar.jet(r, 2)
    dw = W.deriv()
    lap_bar = (dw.deriv() + (d.n - 1) * dw.div_r()).value
    gate_bar = lap_bar + (d.m - 1) * dw.value**2
    return bool(np.all(gate_bar <= _gate_tol(lap_bar)))


@dataclass(frozen=True)
class RatioCurve:
    r: np.ndarray
    ratio: np.ndarray

    @property
    def tail(self):
        return float(self.ratio[-1])

    def rows(self):
        return [(float(a), float(b)) for a, b in zip(self.r, self.ratio)]


def claim2_ratio(obj, dim=None, r=None, tol=None):
    """``exp(-w_bar) * mean_{|x|=r} exp(w)`` at increasing radii.

    With ``tol`` set, a tail farther than ``tol`` from 1 raises :class:`LimitError`.
    """
    if isinstance(obj, SphericalField):
        rr = obj.r if r is None else np.asarray(r, dtype=float)
        if r is not None and not np.array_equal(rr, obj.r):
            raise ValueError("radii of a sampled field are fixed by its grid")
        wbar = obj.values @ obj.weights
        shift = obj.values.max(axis=1)
        ratio = np.exp(shift - wbar) * (np.exp(obj.values - shift[:, None]) @ obj.weights)
    else:
        prof = obj.profile if isinstance(obj, GreensSolution) else obj
        rr = np.geomspace(1e-2, 100.0, 40) if r is None else np.asarray(r, dtype=float)
        prof(rr)
        ratio = np.ones_like(rr)
    curve = RatioCurve(rr, ratio)
    if tol is not None and not abs(curve.tail - 1.0) <= tol:
        raise LimitError(f"ratio tail {curve.tail:.6g} is not within {tol:g} of 1")
    return curve


@dataclass(frozen=True)
class SymmetrizationReport:
    field_id: str
    w_bar: RadialProfile
    shell_defect: float
    sign_preserved: bool | None
    claim2_ratio: RatioCurve

    def to_dict(self):
        return {"field_id": self.field_id, "shell_defect": self.shell_defect,
                "sign_preserved": self.sign_preserved,
                "w_bar": {"r": self.w_bar.r.tolist(), "w": self.w_bar.w.tolist()},
                "ratio_tail": self.claim2_ratio.tail}


def symmetrization_report(fld: SphericalField, field_id="field"):
    try:
        sign = verify_sign_preservation(fld)
    except PreconditionError:
        sign = None
    return SymmetrizationReport(field_id, spherical_symmetrize(fld), verify_shell_equality(fld),
                                sign, claim2_ratio(fld))


# -- harmonicity probe and the Q = 0 rigidity test -----------------------------------

@dataclass(frozen=True)
class ProbeResult:
    center: float
    radii: np.ndarray
    means: np.ndarray

    @property
    def spread(self):
        return float(np.max(self.means) - np.min(self.means))


def harmonicity_probe(p: RadialProfile, dim, centers=(0.0, 1.0, -1.0), radii=None,
                      quad: QuadratureSpec = DEFAULT_QUAD, solution=None):
    """Spherical means of ``u = w - v`` about axial centers, ``v`` the Green's
    representation of ``(-Delta)^m w``; each should be constant in the radius."""
    d = make_dim(dim)
    sol = solution or greens_solve(lambda s: q_density(p, d, s), d, quad)
    radii = np.geomspace(0.05, quad.r_max / 4, 24) if radii is None else np.asarray(radii, float)
    t, wts = polar_rule(d.n, quad.angular_nodes)
    out = []
    for c in centers:
        # |P + rho omega| with P = c e_n and omega at polar angle theta
        dist = np.sqrt(np.maximum(c * c + radii[:, None] ** 2 + 2 * c * radii[:, None] * t[None, :], 0.0))
        u = p(dist.ravel()) - sol(dist.ravel())
        out.append(ProbeResult(c, radii, u.reshape(dist.shape) @ wts))
    return out


@dataclass(frozen=True)
class RigidityResult:
    q_vanishes: bool
    scalar_nonnegative: bool
    nonconstant_max: float

    @property
    def applies(self):
        return self.q_vanishes and self.scalar_nonnegative

    @property
    def passed(self):
        return (not self.applies) or self.nonconstant_max < 1e-4


def rigidity_check(p: RadialProfile, dim, r=None, q_tol=1e-8):
    """If ``Q = 0`` and ``R >= 0`` on the grid, ``w`` must be constant."""
    d = make_dim(dim)
    r = np.geomspace(0.1, 100.0, 4 * d.n + 8) if r is None else np.asarray(r, float)
    q = q_curvature_lcf(p, d, r)
    R = scalar_curvature(p, d, r)
    q_zero = bool(np.all(np.abs(q) < q_tol))
    nonneg = bool(np.all(R >= -1e-12))
    coeff = np.inf
    if q_zero and nonneg:
        coeff = basis_decompose(r, p(r), d).non_constant_max()
    return RigidityResult(q_zero, nonneg, float(coeff))
