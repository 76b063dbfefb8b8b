"""Radial calculus, the polyharmonic basis and classification of ends."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LimitError, NotPolyharmonic, OrderError, make_dim, richardson_limit
from .curvature import scalar_curvature
from .jets import Jet, radial_laplacian
from .profiles import RadialProfile, Term

ENDS = ("infinity", "origin")
DIVERGENCE_THRESHOLD = 1e3


def radial_delta_power(u, dim, k, r):
    """``Delta^k u`` for radial ``u`` (profile or jet callable) on ``R^n``.

    At ``r = 0`` the removable singularity of ``u'/r`` is resolved exactly.
    """
    d = make_dim(dim)
    if not 0 <= k <= d.m:
        raise OrderError(f"k must lie in [0, {d.m}], got {k}")
    r = np.asarray(r, dtype=float)
    if isinstance(u, RadialProfile):
        if 2 * k > u.max_order:
            raise OrderError(f"profile has {u.max_order} derivatives, Delta^{k} needs {2 * k}")
        return u.delta_power(r, d.n, k)
    U = u(Jet.variable(r, 2 * k))
    for _ in range(k):
        U = radial_laplacian(U, d.n)
    return U.value


# -- polyharmonic basis ---------------------------------------------------------

@dataclass(frozen=True)
class BasisFunction:
    label: str
    profile: RadialProfile

    def __call__(self, r):
        return self.profile(r)


def polyharmonic_basis(dim):
    """The ``n`` radial solutions of ``Delta^m u = 0`` on ``R^n \\ {0}``:
    ``1, ln r, r^2, ..., r^{n-2}, r^{-2}, ..., r^{2-n}``."""
    d = make_dim(dim)
    out = [BasisFunction("1", RadialProfile.analytic([Term("power", 1.0, p=0.0)])),
           BasisFunction("ln r", RadialProfile.analytic([Term("log", 1.0)], punctured_origin=True))]
    for j in range(1, d.m):
        out.append(BasisFunction(f"r^{2 * j}", RadialProfile.analytic([Term("power", 1.0, p=2.0 * j)])))
    for j in range(1, d.m):
        out.append(BasisFunction(f"r^-{2 * j}", RadialProfile.analytic(
            [Term("power", 1.0, p=-2.0 * j)], punctured_origin=True)))
    return out


@dataclass(frozen=True)
class Decomposition:
    labels: tuple
    coefficients: tuple
    residual: float
    relative_residual: float

    def as_dict(self):
        return dict(zip(self.labels, self.coefficients))

    def non_constant_max(self):
        return max((abs(c) for lab, c in zip(self.labels, self.coefficients) if lab != "1"),
                   default=0.0)


def basis_decompose(r, u, dim, rtol=1e-6):
    """Least-squares coefficients of samples ``u(r)`` on the polyharmonic basis.

    Columns are scaled to unit norm before solving. Raises
    :class:`NotPolyharmonic` when the residual exceeds ``rtol * ||u||``.
    """
    d = make_dim(dim)
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    if r.shape != u.shape or r.ndim != 1:
        raise ValueError("r and u must be 1-d arrays of equal length")
    if len(r) < 2 * d.n or np.any(r <= 0) or r.max() / r.min() < 10.0:
        raise ValueError(f"need at least {2 * d.n} positive radii spanning a decade")
    basis = polyharmonic_basis(d)
    A = np.stack([b(r) for b in basis], axis=1)
    scale = np.linalg.norm(A, axis=0)
    coef, *_ = np.linalg.lstsq(A / scale, u, rcond=None)
    coef = coef / scale
    res = float(np.linalg.norm(A @ coef - u))
    norm = float(np.linalg.norm(u))
    rel = res / norm if norm > 0 else res
    dec = Decomposition(tuple(b.label for b in basis), tuple(coef.tolist()), res, rel)
    if not res <= rtol * max(norm, 1e-300):
        raise NotPolyharmonic(f"residual {res:.3g} exceeds {rtol:g} * ||u|| = {rtol * norm:.3g}")
    return dec


# -- ends ---------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentEstimate:
    value: float
    error: float

    @property
    def interval(self):
        return (self.value - self.error, self.value + self.error)


def _end_start(p: RadialProfile, end, levels):
    lo, hi = p.domain
    if end == "infinity":
        return 10.0 if np.isinf(hi) else hi / 2 ** (levels - 1)
    return 0.1 if p.representation == "analytic" else max(lo, 1e-12) * 2 ** (levels - 1)


def asymptotic_exponent(p: RadialProfile, end="infinity", order=4, levels=8, tol=1e-6):
    """Extrapolated ``lim r w'(r)`` toward ``end``."""
    if end not in ENDS:
        raise ValueError(f"end must be one of {ENDS}")
    if p.representation == "sampled":
        levels = 6
    r0 = _end_start(p, end, levels)
    lim = richardson_limit(lambda r: r * p.derivative(r, 1), r0, end, levels=levels,
                           order=order, tol=tol if p.representation == "analytic" else None)
    return ExponentEstimate(lim.value, lim.error)


def _log_value(p: RadialProfile, t, end, c1):
    """``w(exp(t))``, extended beyond a sampled hull by the logarithmic tail model."""
    if p.representation == "analytic":
        return p.log_radius_value(t)
    lo, hi = p.domain
    edge = hi if end == "infinity" else max(lo, p.r[0])
    te = np.log(edge)
    inside = (t <= te) if end == "infinity" else (t >= te)
    tin = np.clip(t, np.log(max(lo, p.r[0])), np.log(hi))
    return np.where(inside, p(np.exp(tin)), p(edge) + c1 * (t - te))


@dataclass(frozen=True)
class CompletenessResult:
    end: str
    c1: float
    verdict: str
    borderline: bool
    partial_sum: float | None = None

    @property
    def complete(self):
        return self.verdict == "complete"


def _partial_sums(p, end, c1, doublings=14):
    """``int e^w dr`` toward the end written as ``int exp(w(e^t) + t) dt``,
    evaluated over ``t``-windows doubling in length."""
    sign = 1.0 if end == "infinity" else -1.0
    t0 = 0.0 if p.representation == "analytic" else float(np.log(p.domain[1] if end == "infinity"
                                                                   else max(p.domain[0], p.r[0])))
    x, wts = np.polynomial.legendre.leggauss(32)
    total, sums, a = 0.0, [], 0.0
    for j in range(doublings + 1):
        b = float(2**j)
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        t = t0 + sign * (mid + half * x)
        total += half * float(np.dot(wts, np.exp(_log_value(p, t, end, c1) + t)))
        sums.append(total)
        a = b
        if total > DIVERGENCE_THRESHOLD:
            break
    return sums


def completeness_check(p: RadialProfile, end="infinity", tol=1e-3):
    """Classify an end by its exponent; at the borderline ``c1 = -1`` decide by
    whether the partial sums of ``int e^w dr`` pass ``DIVERGENCE_THRESHOLD``."""
    if end == "origin" and not p.punctured_origin:
        raise ValueError("the origin is an interior point of a profile smooth there")
    c1 = asymptotic_exponent(p, end).value
    if abs(c1 + 1.0) >= tol:
        complete = c1 > -1.0 if end == "infinity" else c1 < -1.0
        return CompletenessResult(end, c1, "complete" if complete else "incomplete", False)
    sums = _partial_sums(p, end, c1)
    verdict = "complete" if sums[-1] > DIVERGENCE_THRESHOLD else "incomplete"
    return CompletenessResult(end, c1, verdict, True, sums[-1])


def _end_bounded(p, end, c1, tol=1e-6, doublings=10):
    sign = 1.0 if end == "infinity" else -1.0
    t = sign * (1.0 + 2.0 ** np.arange(doublings + 1))
    phi = sign * t + _log_value(p, t, end, c1)
    slope = (phi[-1] - phi[-2]) / abs(t[-1] - t[-2])
    return bool(np.all(np.isfinite(phi)) and slope <= tol)


def equality_case_check(p: RadialProfile, dim=None):
    """Whether ``d e^w`` stays bounded, ``d`` the distance to the nearest end
    (``r`` toward infinity, ``r`` toward an origin puncture)."""
    ends = ["infinity"] + (["origin"] if p.punctured_origin else [])
    for end in ends:
        try:
            c1 = asymptotic_exponent(p, end).value
        except LimitError:
            return False
        if end == "origin":
            # r e^w at the puncture: phi(t) = t + w(e^t) as t -> -inf, bounded iff slope >= 0
            t = -(1.0 + 2.0 ** np.arange(11))
            phi = t + _log_value(p, t, end, c1)
            if not (np.all(np.isfinite(phi)) and (phi[-2] - phi[-1]) / abs(t[-1] - t[-2]) >= -1e-6):
                return False
        elif not _end_bounded(p, end, c1):
            return False
    return True


@dataclass(frozen=True)
class EndSpec:
    """One end: ``location`` is ``infinity`` or ``origin`` (a puncture, possibly
    translated to ``center`` in a multi-end picture). ``support`` is the radius
    interval, about the end's own center, where its localized profile lives."""

    location: str
    profile: RadialProfile
    c1: float | None = None
    completeness: str | None = None
    center: float = 0.0
    support: tuple | None = None

    def classified(self):
        res = completeness_check(self.profile, self.location)
        return EndSpec(self.location, self.profile, res.c1, res.verdict, self.center, self.support)

    def to_dict(self):
        return {"location": self.location, "c1": self.c1, "completeness": self.completeness,
                "center": self.center, "support": None if self.support is None else list(self.support)}


# -- sign gate ---------------------------------------------------------------

@dataclass(frozen=True)
class SignGate:
    r: np.ndarray
    R: np.ndarray
    gate: np.ndarray

    @property
    def agree(self):
        """``R >= 0`` exactly where ``Delta w + (m-1)|grad w|^2 <= 0``, up to round-off."""
        scale = 1e-12 * (1.0 + np.abs(self.R))
        return bool(np.all((self.R >= -scale) == (self.gate <= scale)))


def scalar_sign_gate(p: RadialProfile, dim, r):
    """Scalar curvature and ``Delta w + (m-1)|grad w|^2`` on ``r``."""
    d = make_dim(dim)
    r = np.asarray(r, dtype=float)
    W = p.jet(r, 2)
    dw = W.deriv()
    gate = radial_laplacian(W, d.n).value + (d.m - 1) * dw.value**2
    return SignGate(r, scalar_curvature(p, d, r), gate)


def scalar_nonnegative(p: RadialProfile, dim, r, atol=1e-12):
    """``R >= 0`` on ``r``, tested on the flat-scaled ``e^{2w} R`` so decay of
    the conformal factor cannot hide a negative sign."""
    d = make_dim(dim)
    r = np.asarray(r, dtype=float)
    flat = scalar_curvature(p, d, r) * np.exp(2 * p(r))
    return bool(np.all(flat >= -atol * (1.0 + np.abs(flat))))
