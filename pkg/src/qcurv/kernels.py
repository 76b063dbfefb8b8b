"""Spherical-mean kernels and the log-kernel Green's function.

For ``|x| = r`` and ``|y| = s`` write ``rho = min(r, s) / max(r, s)`` and
``t = cos(theta)``. Expanding ``1 / (1 - 2 rho t + rho^2)`` and
``ln(1 - 2 rho t + rho^2)`` in Chebyshev polynomials and averaging against
the polar weight gives, for ``n >= 4``, finite polynomials in ``rho``:

* ``max^2 II = sum_k <U_k> rho^k``
* ``L = ln(s / max) - h(rho) / 2`` with ``h(rho) = -2 sum_k <T_k> rho^k / k``

The moments ``<U_k>``, ``<T_k>`` are computed exactly by Gauss-Gegenbauer
quadrature. These closed forms are the fast route; the quadrature route
integrates over the polar angle directly and serves as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property, lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.special import eval_chebyt, eval_chebyu

from .core import (DEFAULT_QUAD, DomainError, IntegrabilityError, QuadratureError,
                   QuadratureSpec, StructureViolation, composite_gl, geometric_edges,
                   gl_nodes, make_dim, polar_normalizer, polar_rule, richardson_limit,
                   _gl)
from .jets import Jet, radial_laplacian
from .profiles import RadialProfile

_MOMENT_TOL = 1e-13


# -- polar means -----------------------------------------------------------

def sphere_mean(F, dim, quad: QuadratureSpec = DEFAULT_QUAD):
    """Normalized mean of ``F(theta)`` over ``S^{n-1}`` for axisymmetric ``F``.

    Uses the Gauss-Gegenbauer rule with ``quad.angular_nodes`` points and
    checks it against the rule with twice as many.
    """
    d = make_dim(dim)
    vals = []
    for nodes in (quad.angular_nodes, 2 * quad.angular_nodes):
        t, w = polar_rule(d.n, nodes)
        vals.append(float(np.dot(w, F(np.arccos(t)))))
    if not abs(vals[1] - vals[0]) <= quad.eps_quad:
        raise QuadratureError(f"polar mean did not converge (change {abs(vals[1] - vals[0]):.3g})")
    return vals[1]


def graded_theta_mean(g, n, scale, eps=1e-10, nodes=20):
    """Mean of ``g(theta)`` against ``sin^{n-2}`` with panels graded toward ``theta = 0``.

    ``scale`` is the angular width of a near-singularity at the north pole
    (``0`` for an integrable log singularity exactly there).
    """
    lo = min(1e-2, max(scale, 1e-12) * 1e-2)
    edges = np.concatenate([[0.0], np.geomspace(lo, np.pi, int(np.ceil(np.log10(np.pi / lo) * 5)) + 1)])
    val, err = composite_gl(lambda th: g(th) * np.sin(th) ** (n - 2), edges, nodes)
    norm = polar_normalizer(n)
    if not err / norm <= eps * max(1.0, abs(val) / norm):
        raise QuadratureError(f"singular polar quadrature did not converge (change {err / norm:.3g})")
    return val / norm


@lru_cache(maxsize=None)
def chebyshev_moments(n: int, kmax: int = 24):
    """``(<U_k>, <T_k>)`` for ``k = 0..kmax`` with round-off zeros cleaned."""
    t, w = polar_rule(n, 64)
    mu = np.array([np.dot(w, eval_chebyu(k, t)) for k in range(kmax + 1)])
    tau = np.array([np.dot(w, eval_chebyt(k, t)) for k in range(kmax + 1)])
    mu[np.abs(mu) < _MOMENT_TOL] = 0.0
    tau[np.abs(tau) < _MOMENT_TOL] = 0.0
    return mu, tau


@dataclass(frozen=True)
class KernelPolynomials:
    """Coefficients in ``rho`` of the closed-form kernels.

    ``ii[k]``: ``max^2 II``; ``h[k]``: ``h(rho)``; ``g_in`` / ``g_out``:
    ``G`` for ``s < r`` and ``s > r``. ``ii`` is ``None`` for ``n = 2``,
    where ``II = 1 / |r^2 - s^2|`` is not a polynomial in ``rho``.
    """

    n: int
    ii: np.ndarray | None
    h: np.ndarray
    g_in: np.ndarray
    g_out: np.ndarray


def _trim(c):
    nz = np.nonzero(c)[0]
    return c[: nz[-1] + 1] if len(nz) else c[:1] * 0.0


@lru_cache(maxsize=None)
def kernel_polynomials(n: int) -> KernelPolynomials:
    d = make_dim(n)
    mu, tau = chebyshev_moments(d.n)
    k = np.arange(len(tau))
    h = np.zeros_like(tau)
    h[1:] = -2.0 * tau[1:] / k[1:]
    h = _trim(h)
    if d.n == 2:
        return KernelPolynomials(2, None, h, np.array([1.0]), np.array([0.0]))
    ii = _trim(mu)
    # G = 1/2 + 1/2 (1 - rho^2) P(rho) inside, 1/2 - 1/2 (1 - rho^2) P(rho) outside
    one_minus = np.polynomial.polynomial.polymul([1.0, 0.0, -1.0], ii)
    g_in = np.polynomial.polynomial.polyadd([0.5], 0.5 * one_minus)
    g_out = np.polynomial.polynomial.polyadd([0.5], -0.5 * one_minus)
    return KernelPolynomials(d.n, ii, h, _trim(g_in), _trim(g_out))


def _split(r, s):
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    big = np.maximum(r, s)
    small = np.minimum(r, s)
    if np.any(big == 0):
        raise DomainError("kernels are undefined at r = s = 0")
    return r, s, big, small / big


def _polyval(coeffs, x):
    return np.polynomial.polynomial.polyval(x, coeffs)


# -- kernels -----------------------------------------------------------------

def kernel_II(r, s, dim, method="series", quad: QuadratureSpec = DEFAULT_QUAD):
    """Spherical mean of ``|x - y|^{-2}``."""
    d = make_dim(dim)
    if method == "quadrature":
        return _vectorize_quad(lambda a, b: _ii_quad(a, b, d.n, quad), r, s)
    r, s, big, rho = _split(r, s)
    if d.n == 2:
        with np.errstate(divide="ignore"):
            return 1.0 / np.abs(r**2 - s**2)
    return _polyval(kernel_polynomials(d.n).ii, rho) / big**2


def kernel_G(r, s, dim, method="series", quad: QuadratureSpec = DEFAULT_QUAD):
    """Spherical mean of ``(r^2 - s^2 + |x - y|^2) / (2 |x - y|^2)``."""
    d = make_dim(dim)
    if method == "quadrature":
        return _vectorize_quad(lambda a, b: _g_quad(a, b, d.n, quad), r, s)
    r, s, big, rho = _split(r, s)
    kp = kernel_polynomials(d.n)
    inside = _polyval(kp.g_in, rho)
    outside = _polyval(kp.g_out, rho)
    return np.where(s < r, inside, np.where(s > r, outside, 0.5))


def kernel_log(r, s, dim, method="series", quad: QuadratureSpec = DEFAULT_QUAD):
    """Spherical mean of ``ln(s / |x - y|)``."""
    d = make_dim(dim)
    if method == "quadrature":
        return _vectorize_quad(lambda a, b: _log_quad(a, b, d.n, quad), r, s)
    r, s, big, rho = _split(r, s)
    with np.errstate(divide="ignore"):
        base = np.where(s > 0, np.log(np.where(s > 0, s, 1.0) / big), -np.inf)
    return base - 0.5 * _polyval(kernel_polynomials(d.n).h, rho)


def _vectorize_quad(fn, r, s):
    r, s = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(s, dtype=float))
    out = np.array([fn(a, b) for a, b in zip(r.ravel(), s.ravel())])
    return out.reshape(r.shape) if r.ndim else float(out[0])


def _dist2(r, s, th):
    # (r - s)^2 + 4 r s sin^2(theta/2) avoids cancellation near r = s, theta = 0
    return (r - s) ** 2 + 4.0 * r * s * np.sin(0.5 * th) ** 2


def _scale(r, s):
    return abs(r - s) / max(r, s)


def _ii_quad(r, s, n, quad):
    if r == 0 and s == 0:
        raise DomainError("kernels are undefined at r = s = 0")
    if r == s and n == 2:
        return np.inf
    return graded_theta_mean(lambda th: 1.0 / _dist2(r, s, th), n, _scale(r, s), quad.eps_quad * 1e-3)


def _g_quad(r, s, n, quad):
    if r == 0 and s == 0:
        raise DomainError("kernels are undefined at r = s = 0")
    if r == s:
        return 0.5
    return graded_theta_mean(lambda th: 0.5 * (r * r - s * s + _dist2(r, s, th)) / _dist2(r, s, th),
                             n, _scale(r, s), quad.eps_quad * 1e-3)


def _log_quad(r, s, n, quad):
    if r == 0 and s == 0:
        raise DomainError("kernels are undefined at r = s = 0")
    if s == 0:
        return -np.inf
    return graded_theta_mean(lambda th: np.log(s) - 0.5 * np.log(_dist2(r, s, th)),
                             n, _scale(r, s), quad.eps_quad * 1e-3)


# -- tables ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KernelTable:
    n: int
    r: np.ndarray
    s: np.ndarray
    II: np.ndarray
    G: np.ndarray
    L: np.ndarray
    method: str = "series"

    def rows(self):
        for i, ri in enumerate(self.r):
            for j, sj in enumerate(self.s):
                yield (float(ri), float(sj), float(self.II[i, j]), float(self.G[i, j]),
                       float(self.L[i, j]))

    def identity_defect(self):
        """Max of ``|G - 1/2 - (r^2 - s^2) II / 2|`` over finite entries."""
        R, S = np.meshgrid(self.r, self.s, indexing="ij")
        ok = np.isfinite(self.II)
        return float(np.max(np.abs(self.G - 0.5 - 0.5 * (R**2 - S**2) * self.II)[ok], initial=0.0))


def offset_grids(count=30, lo=0.05, hi=20.0):
    """Geometric ``r`` grid and an interleaved ``s`` grid that never meets the diagonal."""
    r = np.geomspace(lo, hi, count)
    s = np.sqrt(r[:-1] * r[1:])
    s = np.append(s, s[-1] * r[1] / r[0])
    return r, s


def kernel_table(dim, r_grid, s_grid, method="series", quad: QuadratureSpec = DEFAULT_QUAD):
    d = make_dim(dim)
    R, S = np.meshgrid(np.asarray(r_grid, float), np.asarray(s_grid, float), indexing="ij")
    return KernelTable(d.n, np.asarray(r_grid, float), np.asarray(s_grid, float),
                       kernel_II(R, S, d, method, quad), kernel_G(R, S, d, method, quad),
                       kernel_log(R, S, d, method, quad), method)


# -- kernel structure --------------------------------------------------------

@dataclass(frozen=True)
class StructureReport:
    n: int
    C: float
    max_violation: float
    poly: tuple
    residual: float
    handled_case: str | None = None

    def to_dict(self):
        return {"n": self.n, "C": self.C, "max_violation": self.max_violation,
                "poly": list(self.poly), "residual": self.residual,
                "handled_case": self.handled_case}


def _structure_constant(n, r, s, quad):
    R, S = np.meshgrid(r, s, indexing="ij")
    ii = kernel_II(R, S, n, "quadrature", quad)
    inner = S < R
    ratios = []
    if np.any(inner & (S > 0)):
        m = inner & (S > 0)
        ratios.append(np.max(np.abs(R[m] ** 2 * ii[m] - 1.0) * R[m] ** 2 / S[m] ** 2))
    if np.any(~inner):
        m = ~inner
        ratios.append(np.max(ii[m] * S[m] ** 2))
    return max(ratios) if ratios else 0.0, R, S, ii


def verify_lemma2(dim, r_grid, s_grid, quad: QuadratureSpec = DEFAULT_QUAD, tol=1e-6):
    """Fit the bound constant and the polynomial structure of ``r^2 II`` on ``s < r``.

    ``II`` comes from the quadrature route, so the fit is an independent
    check on the closed form. For ``n = 2`` the polynomial has no admissible
    terms; the check is replaced by comparing against ``1 / |r^2 - s^2|``.
    """
    d = make_dim(dim)
    r = np.asarray(r_grid, float)
    s = np.asarray(s_grid, float)
    R0, S0 = np.meshgrid(r, s, indexing="ij")
    if np.any(R0 == S0):
        raise ValueError("grids must avoid r = s")
    C_fit, R, S, ii = _structure_constant(d.n, r, s, quad)
    # bound re-checked on the geometric midpoints of both grids
    rm = np.sqrt(r[1:] * r[:-1]) if np.all(r > 0) else 0.5 * (r[1:] + r[:-1])
    sm = np.sqrt(s[1:] * s[:-1]) if np.all(s > 0) else 0.5 * (s[1:] + s[:-1])
    C_mid, *_ = _structure_constant(d.n, rm[~np.isin(rm, sm)], sm, quad)
    violation = max(0.0, C_mid - C_fit) / max(C_fit, 1e-300)
    inner = (S < R) & (S > 0)
    x = (S[inner] / R[inner]) ** 2
    y = R[inner] ** 2 * ii[inner] - 1.0
    if d.n == 2:
        ref = 1.0 / np.abs(R[inner] ** 2 - S[inner] ** 2)
        resid = float(np.max(np.abs(ii[inner] - ref) / ref, initial=0.0))
        report = StructureReport(2, float(C_fit), float(violation), (), resid,
                              "n=2: no non-constant terms allowed; checked against 1/|r^2-s^2|")
    else:
        cols = np.stack([x**k for k in range(1, d.m)], axis=1)
        coef, *_ = np.linalg.lstsq(cols, y, rcond=None)
        resid = float(np.max(np.abs(cols @ coef - y), initial=0.0))
        report = StructureReport(d.n, float(C_fit), float(violation), tuple(coef.tolist()), resid)
    if not report.residual <= tol:
        raise StructureViolation(f"kernel structure residual {report.residual:.3g} exceeds {tol:g}")
    return report


# -- Green's function ------------------------------------------------------

def _as_source(f):
    if isinstance(f, RadialProfile):
        return f.__call__
    if callable(f):
        return f
    const = float(f)
    return lambda s: np.full_like(np.asarray(s, dtype=float), const)


@dataclass(frozen=True, eq=False)
class GreensSolution:
    """``v(r) = c_n |S^{n-1}| int_0^inf L(r, s) f(s) s^{n-1} ds`` with ``v(0) = 0``.

    Every kernel is a polynomial in ``rho`` on each side of ``s = r``, so
    ``v``, ``r v'`` and ``Delta v`` reduce to the weighted cumulative
    integrals ``int_0^r s^p f s^{n-1} ds`` which are evaluated on composite
    Gauss-Legendre panels.
    """

    n: int
    f: object
    quad: QuadratureSpec
    edges: np.ndarray
    tail_bound: float
    mass: float
    mass_error: float
    breakpoints: tuple = ()
    _cum: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return make_dim(self.n)

    @property
    def r_max(self):
        return self.quad.r_max

    # cumulative integrals
    def _weight(self, key):
        p, with_log = key
        f = self.f
        n = self.n
        if with_log:
            return lambda s: np.log(s) * f(s) * s ** (n - 1)
        return lambda s: s**p * f(s) * s ** (n - 1)

    def _panel_cumsum(self, key):
        if key not in self._cum:
            x, w = gl_nodes(self.edges, self.quad.radial_nodes)
            vals = (w * self._weight(key)(x)).reshape(len(self.edges) - 1, -1).sum(axis=1)
            self._cum[key] = np.concatenate([[0.0], np.cumsum(vals)])
        return self._cum[key]

    def cumulative(self, r, p=0, with_log=False):
        """``int_0^r s^p f(s) s^{n-1} ds`` (``ln s`` instead of ``s^p`` if ``with_log``)."""
        key = (p, with_log)
        cum = self._panel_cumsum(key)
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        idx = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, len(self.edges) - 2)
        a = self.edges[idx]
        x, w = _gl(self.quad.radial_nodes)
        half = 0.5 * (flat - a)
        pts = a[:, None] + half[:, None] * (x[None, :] + 1.0)
        part = np.sum(w[None, :] * half[:, None] * self._weight(key)(np.where(half[:, None] > 0, pts, 1.0))
                      * (half[:, None] > 0), axis=1)
        return (cum[idx] + part).reshape(r.shape)

    def total(self, p=0):
        return self._panel_cumsum((p, False))[-1]

    def _kernel_sum(self, r, coeffs, inner_shift=0):
        """``sum_k c_k [r^{-k} int_0^r s^k F + r^k int_r^inf s^{-k} F]`` for ``F = f s^{n-1}``
        split by side; returns (inner, outer)."""
        inner = np.zeros_like(r)
        outer = np.zeros_like(r)
        for k, c in enumerate(coeffs):
            if c == 0.0:
                continue
            p_in, p_out = k + inner_shift, -k + inner_shift
            inner = inner + c * r ** (-k) * self.cumulative(r, p_in)
            outer = outer + c * r**k * (self.total(p_out) - self.cumulative(r, p_out))
        return inner, outer

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        pos = r > 0
        rp = r[pos]
        d = self.dim
        kp = kernel_polynomials(self.n)
        log_part = self.cumulative(rp, with_log=True) - np.log(rp) * self.cumulative(rp, 0)
        inner, outer = self._kernel_sum(rp, kp.h)
        out[pos] = d.c_n * d.sphere_volume * (log_part - 0.5 * (inner + outer))
        return out

    def rv_dot(self, r):
        """``r v'(r) = -c_n |S^{n-1}| int G(r, s) f(s) s^{n-1} ds``."""
        r = np.asarray(r, dtype=float)
        d = self.dim
        kp = kernel_polynomials(self.n)
        out = np.zeros_like(r)
        pos = r > 0
        rp = r[pos]
        inner = np.zeros_like(rp)
        outer = np.zeros_like(rp)
        for k, c in enumerate(kp.g_in):
            if c:
                inner = inner + c * rp ** (-k) * self.cumulative(rp, k)
        for k, c in enumerate(kp.g_out):
            if c:
                outer = outer + c * rp**k * (self.total(-k) - self.cumulative(rp, -k))
        out[pos] = -d.c_n * d.sphere_volume * (inner + outer)
        return out

    def laplacian(self, r):
        """``Delta v``; ``-(n-2) c_n |S^{n-1}| int II f s^{n-1} ds`` for ``n >= 4``."""
        r = np.asarray(r, dtype=float)
        d = self.dim
        if self.n == 2:
            return -_as_source(self.f)(r)
        kp = kernel_polynomials(self.n)
        rp = np.where(r > 0, r, 1.0)
        inner = np.zeros_like(rp)
        outer = np.zeros_like(rp)
        for k, c in enumerate(kp.ii):
            if c:
                inner = inner + c * rp ** (-k - 2) * self.cumulative(rp, k)
                outer = outer + c * rp**k * (self.total(-k - 2) - self.cumulative(rp, -k - 2))
        out = -(self.n - 2) * d.c_n * d.sphere_volume * (inner + outer)
        if np.any(r == 0):
            at0 = -(self.n - 2) * d.c_n * d.sphere_volume * kp.ii[0] * self.total(-2)
            out = np.where(r == 0, at0, out)
        return out

    # diagnostics
    @cached_property
    def grid(self):
        return np.concatenate([[0.0], np.geomspace(1e-3, self.r_max, 160)])

    @cached_property
    def profile(self) -> RadialProfile:
        """Sampled profile of ``v`` on ``[0, r_max]``."""
        return RadialProfile.sampled(self.grid, self(self.grid), max_order=max(self.n, 4))

    def residual(self, r=None):
        """Relative sup residual of ``(-Delta)^m v - f`` at interior radii."""
        if r is None:
            r = np.geomspace(0.05, 0.5 * self.r_max, 40)
        r = np.asarray(r, dtype=float)
        m = self.dim.m
        if self.n == 2:
            lap = local_jet(self.__call__, r, 2)
            lhs = -radial_laplacian(lap, 2).value
        else:
            u = local_jet(self.laplacian, r, 2 * (m - 1))
            for _ in range(m - 1):
                u = radial_laplacian(u, self.n)
            lhs = (-1.0) ** m * u.value
        f = _as_source(self.f)(r)
        scale = max(float(np.max(np.abs(f))), 1e-300)
        return float(np.max(np.abs(lhs - f)) / scale)

    def error_estimate(self):
        """Quadrature change under panel bisection plus the truncated tail."""
        d = self.dim
        return d.c_n * d.sphere_volume * (self.mass_error + self.tail_bound)


def local_jet(fn, r, order, rel=None, floor=None, degree=None):
    """Taylor jet of a radial function from a local Chebyshev fit.

    The fit uses points ``r + H cos(...)`` with ``H = max(rel r, floor)``;
    radial functions are even, so negative abscissae are reflected. Higher
    orders need wider windows to keep round-off amplification ``H^-order``
    in check.
    """
    rel = 0.01 * max(order, 2) if rel is None else rel
    floor = 0.005 * max(order, 2) if floor is None else floor
    degree = 12 + order if degree is None else degree
    r = np.asarray(r, dtype=float)
    H = np.maximum(rel * r, floor)
    nodes = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
    pts = r[:, None] + H[:, None] * nodes[None, :]
    vals = fn(np.abs(pts).ravel()).reshape(pts.shape)
    derivs = np.zeros((order + 1, len(r)))
    for i in range(len(r)):
        c = C.chebfit(nodes, vals[i], degree)
        for k in range(order + 1):
            derivs[k, i] = C.chebval(0.0, C.chebder(c, k) if k else c) / H[i] ** k
    return Jet.from_derivatives(derivs, r)


def greens_solve(f, dim, quad: QuadratureSpec = DEFAULT_QUAD, breakpoints=(),
                 extent=1e3) -> GreensSolution:
    """Green's representation of the solution of ``(-Delta)^m v = f`` with ``v(0) = 0``.

    Integrals run to ``extent * quad.r_max``; the mass of ``|f|`` beyond
    ``quad.r_max`` is reported as ``tail_bound`` and must be below
    ``quad.eps_quad``.
    """
    d = make_dim(dim)
    fn = _as_source(f)
    hi = extent * quad.r_max
    per_decade = max(8, quad.radial_nodes // 2)
    edges = geometric_edges(1e-4, hi, per_decade, extra=tuple(breakpoints) + (quad.r_max,))

    def weight(s):
        return np.abs(fn(s)) * s ** (d.n - 1)

    with np.errstate(all="ignore"):
        probe = fn(np.geomspace(1e-4, hi, 64))
    if not np.all(np.isfinite(probe)):
        raise IntegrabilityError("source is not finite on the integration range")
    tail_edges = edges[edges >= quad.r_max]
    tail, _ = composite_gl(weight, tail_edges, quad.radial_nodes)
    # power-law extrapolation of the remainder beyond the last edge
    w1, w2 = weight(np.array([hi / 2.0, hi]))
    slope = np.log2(w2 / w1) if w1 > 0 and w2 > 0 else (-np.inf if w2 == 0 else 0.0)
    if slope < -1.5:
        tail += hi * w2 / (-slope - 1.0)
    elif hi * w2 < 1e-3 * quad.eps_quad:
        # round-off floor of the source, far below tolerance
        tail += 10.0 * hi * w2
    else:
        tail = np.inf
    if not tail <= quad.eps_quad:
        raise IntegrabilityError(f"source tail beyond r_max is {tail:.3g} > eps_quad")
    mass, mass_err = composite_gl(weight, edges, quad.radial_nodes)
    if mass_err > quad.eps_quad:
        raise QuadratureError(f"radial quadrature of the source did not converge ({mass_err:.3g})")
    return GreensSolution(d.n, fn, quad, edges, float(tail), float(mass), float(mass_err),
                          tuple(breakpoints))


@dataclass(frozen=True)
class LimitPair:
    origin: float
    infinity: float
    origin_error: float
    infinity_error: float
    expected_infinity: float

    def as_tuple(self):
        return (self.origin, self.infinity)


def rv_dot_limits(f, dim, quad: QuadratureSpec = DEFAULT_QUAD, tol=None, solution=None):
    """Extrapolated limits of ``r v'(r)`` at ``0`` and ``infinity``.

    ``expected_infinity`` is ``-c_n int f``, the value the limit must take.
    """
    d = make_dim(dim)
    sol = solution or greens_solve(f, d, quad)
    tol = 10 * quad.eps_quad if tol is None else tol
    order = quad.extrap_order
    at0 = richardson_limit(sol.rv_dot, 1e-2, "origin", order=order, tol=tol)
    at_inf = richardson_limit(sol.rv_dot, quad.r_max / 4, "infinity", order=order, tol=tol)
    expected = -d.c_n * d.sphere_volume * sol.total(0)
    return LimitPair(at0.value, at_inf.value, at0.error, at_inf.error, expected)


@dataclass(frozen=True)
class DecayReport:
    sup_rv_dot: float
    sup_r2_lap: float
    sup_rv_dot_doubled: float
    sup_r2_lap_doubled: float

    @property
    def stable(self):
        return (np.isfinite([self.sup_rv_dot, self.sup_r2_lap]).all()
                and self.sup_rv_dot_doubled <= 1.01 * self.sup_rv_dot + 1e-12
                and self.sup_r2_lap_doubled <= 1.01 * self.sup_r2_lap + 1e-12)

    def to_dict(self):
        return {"sup_rv_dot": self.sup_rv_dot, "sup_r2_lap": self.sup_r2_lap,
                "sup_rv_dot_doubled": self.sup_rv_dot_doubled,
                "sup_r2_lap_doubled": self.sup_r2_lap_doubled, "stable": bool(self.stable)}


def decay_sups(f, dim, quad: QuadratureSpec = DEFAULT_QUAD):
    """``sup r |v'|`` and ``sup r^2 |Delta v|`` up to ``r_max`` and up to ``2 r_max``."""
    out = []
    for q in (quad, replace(quad, r_max=2 * quad.r_max)):
        sol = greens_solve(f, dim, q)
        r = np.geomspace(1e-3, q.r_max, 400)
        out.append((float(np.max(np.abs(sol.rv_dot(r)))),
                    float(np.max(r**2 * np.abs(sol.laplacian(r))))))
    return DecayReport(out[0][0], out[0][1], out[1][0], out[1][1])
