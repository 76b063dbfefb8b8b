"""Conformal-factor representations.

A :class:`RadialProfile` is either a sum of analytic terms

* ``log1p_sq``: ``c * ln(1 + r^2 / rho^2)``
* ``log``: ``c * ln r`` (only on profiles punctured at the origin)
* ``power``: ``c * r^p`` (``p = 0`` gives a constant)

or samples on an increasing radial grid with a high-degree spline. Both
expose :meth:`RadialProfile.jet`, which is all the curvature code needs.

:class:`SphericalField` stores an axisymmetric field ``w(r, theta)`` on a
radial grid times a Gauss-Gegenbauer polar rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator
from scipy.interpolate import make_interp_spline

from .core import MAX_DIM, DomainError, OrderError, SchemaError, polar_rule
from .jets import Jet

TERM_KINDS = ("log1p_sq", "log", "power")


@dataclass(frozen=True)
class Term:
    kind: str
    c: float
    rho: float = 1.0
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in TERM_KINDS:
            raise ValueError(f"unknown term kind {self.kind!r}")
        if self.kind == "log1p_sq" and not self.rho > 0:
            raise ValueError("rho must be positive")

    def singular_at_origin(self):
        return self.kind == "log" or (self.kind == "power" and self.p < 0)

    def derivative(self, r, k):
        r = np.asarray(r, dtype=float)
        c = self.c
        if self.kind == "log1p_sq":
            if k == 0:
                return c * np.log1p((r / self.rho) ** 2)
            z = (r + 1j * self.rho) ** k
            return c * 2.0 * (-1.0) ** (k - 1) * factorial(k - 1) * np.real(1.0 / z)
        if self.kind == "log":
            if k == 0:
                return c * np.log(r)
            return c * (-1.0) ** (k - 1) * factorial(k - 1) / r**k
        ff = 1.0
        for i in range(k):
            ff *= self.p - i
        if ff == 0.0:
            return np.zeros_like(r)
        e = self.p - k
        if e == 0:
            return np.full_like(r, c * ff)
        with np.errstate(divide="ignore"):
            return c * ff * r**e

    def delta_power(self, r, n, k):
        """Flat ``Delta^k`` of the term on ``R^n``, without cancellation at large ``r``."""
        r = np.asarray(r, dtype=float)
        if k == 0:
            return self.derivative(r, 0)
        if self.kind == "log1p_sq":
            y = 1.0 / (1.0 + (r / self.rho) ** 2)
            poly = _log1p_delta_poly(n, k)
            return self.c * self.rho ** (-2 * k) * np.polynomial.polynomial.polyval(y, poly)
        coef, p = (self.c * (n - 2), -2.0) if self.kind == "log" else (self.c, self.p)
        for _ in range(k - 1 if self.kind == "log" else k):
            coef *= p * (p + n - 2)
            p -= 2
        if coef == 0.0:
            return np.zeros_like(r)
        with np.errstate(divide="ignore"):
            return coef * r**p if p != 0 else np.full_like(r, coef)

    def radial_flux(self, r, n, k):
        """``r^{n-1} d/dr Delta^k`` of the term on ``R^n``, exact."""
        r = np.asarray(r, dtype=float)
        if k == 0:
            return self.derivative(r, 1) * r ** (n - 1)
        if self.kind == "log1p_sq":
            y = 1.0 / (1.0 + (r / self.rho) ** 2)
            dpoly = np.polynomial.polynomial.polyder(_log1p_delta_poly(n, k))
            dy = -2.0 * r / self.rho**2 * y**2
            return (self.c * self.rho ** (-2 * k) * np.polynomial.polynomial.polyval(y, dpoly)
                    * dy * r ** (n - 1))
        coef, p = (self.c * (n - 2), -2.0) if self.kind == "log" else (self.c, self.p)
        for _ in range(k - 1 if self.kind == "log" else k):
            coef *= p * (p + n - 2)
            p -= 2
        if coef * p == 0.0:
            return np.zeros_like(r)
        with np.errstate(divide="ignore"):
            return coef * p * r ** (p + n - 2)

    def log_radius_value(self, t):
        """Value at ``r = exp(t)`` without overflow for large ``|t|``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "log1p_sq":
            return self.c * np.logaddexp(0.0, 2.0 * (t - np.log(self.rho)))
        if self.kind == "log":
            return self.c * t
        return self.c * np.exp(self.p * t)

    def to_dict(self):
        d = {"kind": self.kind, "c": self.c}
        if self.kind == "log1p_sq":
            d["rho"] = self.rho
        if self.kind == "power":
            d["p"] = self.p
        return d


@lru_cache(maxsize=None)
def _log1p_delta_poly(n, k):
    """Coefficients in ``y = 1/(1 + r^2)`` of ``Delta^k ln(1 + r^2)`` on ``R^n``.

    With ``x = r^2`` a radial Laplacian is ``4x g_xx + 2n g_x``; in ``y`` it
    maps polynomials to polynomials.
    """
    P = np.polynomial.Polynomial
    y = P([0.0, 1.0])
    g = (2 * n - 4) * y + 4 * y**2
    for _ in range(k - 1):
        g = (8 * (1 - y) * y**2 - 2 * n * y**2) * g.deriv() + 4 * (1 - y) * y**3 * g.deriv(2)
    return tuple(g.coef)


def _smooth_power(p, max_order):
    return p >= 0 and (float(p).is_integer() and int(p) % 2 == 0 or p > max_order)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial conformal factor ``w(r)``; build with :meth:`analytic` or :meth:`sampled`."""

    representation: str
    terms: tuple = ()
    punctured_origin: bool = False
    r: np.ndarray | None = None
    w: np.ndarray | None = None
    max_order: int = MAX_DIM
    name: str = ""
    _spline: object = field(default=None, repr=False)

    # -- constructors -------------------------------------------------
    @classmethod
    def analytic(cls, terms, punctured_origin=False, max_order=MAX_DIM, name=""):
        terms = tuple(t if isinstance(t, Term) else Term(**t) for t in terms)
        if not punctured_origin:
            for t in terms:
                if t.singular_at_origin():
                    raise ValueError(f"term {t.kind} is singular at the origin; "
                                     "declare the profile punctured_origin")
                if t.kind == "power" and not _smooth_power(t.p, max_order):
                    raise ValueError(f"power r^{t.p} is not smooth at the origin")
        return cls("analytic", terms, bool(punctured_origin), max_order=max_order, name=name)

    @classmethod
    def sampled(cls, r, w, punctured_origin=False, max_order=MAX_DIM, name="", degree=None):
        """Spline through ``(r, w)``.

        Unless the profile is punctured, the data are mirrored to ``-r`` so
        the interpolant is even and ``w'(0) = 0``.
        """
        r = np.array(r, dtype=float)
        w = np.array(w, dtype=float)
        if r.ndim != 1 or r.shape != w.shape:
            raise ValueError("r and w must be 1-d arrays of equal length")
        if np.any(np.diff(r) <= 0):
            raise ValueError("sampled grid must be strictly increasing")
        if r[0] < 0:
            raise ValueError("radii must be non-negative")
        k = degree if degree is not None else max_order + 1 + (max_order % 2 == 0)
        if punctured_origin:
            if r[0] == 0:
                raise ValueError("a punctured profile cannot be sampled at r = 0")
            x, y = r, w
        else:
            start = 1 if r[0] == 0 else 0
            x = np.concatenate([-r[start:][::-1], r])
            y = np.concatenate([w[start:][::-1], w])
        if len(x) <= k:
            raise ValueError(f"need more than {k} interpolation nodes")
        spline = make_interp_spline(x, y, k=k)
        r.setflags(write=False)
        w.setflags(write=False)
        return cls("sampled", (), bool(punctured_origin), r, w, max_order, name, spline)

    # -- evaluation ---------------------------------------------------
    @property
    def domain(self):
        if self.representation == "analytic":
            return (0.0, np.inf)
        lo = self.r[0] if self.punctured_origin else 0.0
        return (float(lo), float(self.r[-1]))

    def check_domain(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.domain
        if np.any(~np.isfinite(r)) or np.any(r < lo) or np.any(r > hi * (1 + 1e-12)):
            raise DomainError(f"radius outside the profile domain [{lo}, {hi}]")
        if self.punctured_origin and np.any(r <= 0):
            raise DomainError("profile is punctured at the origin; r must be positive")
        return r

    def derivative(self, r, order=0):
        if order < 0 or order > self.max_order:
            raise OrderError(f"derivative order {order} outside [0, {self.max_order}]")
        r = self.check_domain(r)
        if self.representation == "analytic":
            out = np.zeros_like(r)
            for t in self.terms:
                out = out + t.derivative(r, order)
            return out
        return self._spline(r, nu=order)

    def __call__(self, r):
        return self.derivative(r, 0)

    @property
    def even_analytic(self):
        """Whether ``w`` is an even function analytic about the origin."""
        return self.representation == "analytic" and not self.punctured_origin and all(
            t.kind == "log1p_sq" or float(t.p).is_integer() and int(t.p) % 2 == 0
            for t in self.terms)

    def jet(self, r, order=None) -> Jet:
        """Taylor jet; analytic profiles accept orders beyond ``max_order``."""
        order = self.max_order if order is None else order
        if self.representation == "analytic" and order > self.max_order:
            r = self.check_domain(r)
            derivs = np.stack([sum((t.derivative(r, k) for t in self.terms), np.zeros_like(r))
                               for k in range(order + 1)])
        else:
            r = np.asarray(r, dtype=float)
            derivs = np.stack([self.derivative(r, k) for k in range(order + 1)])
        return Jet.from_derivatives(derivs, r, 1 if self.even_analytic else None)

    def delta_power(self, r, n, k):
        """Flat ``Delta^k w`` on ``R^n``; exact term by term for analytic profiles."""
        r = self.check_domain(r)
        if self.representation == "analytic":
            out = np.zeros_like(r)
            for t in self.terms:
                out = out + t.delta_power(r, n, k)
            return out
        u = self.jet(r, 2 * k)
        for _ in range(k):
            du = u.deriv()
            u = du.deriv() + (n - 1) * du.div_r()
        return u.value

    def radial_flux(self, r, n, k):
        """``r^{n-1} d/dr Delta^k w`` on ``R^n``; exact for analytic profiles."""
        r = self.check_domain(r)
        if self.representation == "analytic":
            out = np.zeros_like(r)
            for t in self.terms:
                out = out + t.radial_flux(r, n, k)
            return out
        u = self.jet(r, 2 * k + 1)
        for _ in range(k):
            du = u.deriv()
            u = du.deriv() + (n - 1) * du.div_r()
        return u.deriv().value * r ** (n - 1)

    def log_radius_value(self, t):
        """``w(exp(t))``; analytic profiles stay finite far beyond float range of r."""
        t = np.asarray(t, dtype=float)
        if self.representation == "analytic":
            out = np.zeros_like(t)
            for term in self.terms:
                out = out + term.log_radius_value(t)
            return out
        return self(np.exp(t))

    def log_coefficient(self, end="infinity"):
        """Exact ``lim r w'(r)`` at the end for analytic profiles (``None`` if divergent)."""
        if self.representation != "analytic":
            raise ValueError("log coefficient is only known exactly for analytic profiles")
        a = 0.0
        for t in self.terms:
            if t.kind == "log":
                a += t.c
            elif t.kind == "log1p_sq" and end == "infinity":
                a += 2.0 * t.c
            elif t.kind == "power" and t.c != 0.0 and t.p != 0.0:
                if (end == "infinity") == (t.p > 0):
                    return None
        return a

    def shifted(self, const):
        if self.representation == "analytic":
            return RadialProfile.analytic(self.terms + (Term("power", const, p=0.0),),
                                          self.punctured_origin, self.max_order, self.name)
        return RadialProfile.sampled(self.r, self.w + const, self.punctured_origin,
                                     self.max_order, self.name)

    def with_max_order(self, max_order):
        if self.representation == "analytic":
            return RadialProfile.analytic(self.terms, self.punctured_origin, max_order, self.name)
        return RadialProfile.sampled(self.r, self.w, self.punctured_origin, max_order, self.name)

    def to_dict(self):
        if self.representation == "analytic":
            return {"type": "analytic", "punctured_origin": self.punctured_origin,
                    "terms": [t.to_dict() for t in self.terms]}
        return {"type": "sampled", "punctured_origin": self.punctured_origin,
                "r": self.r.tolist(), "w": self.w.tolist()}


def eval_profile(p: RadialProfile, r, order: int = 0, dim=None):
    """``d^order w / dr^order`` at ``r``; ``order`` may not exceed the dimension."""
    limit = p.max_order if dim is None else min(p.max_order, getattr(dim, "n", dim))
    if order < 0 or order > limit:
        raise OrderError(f"derivative order {order} outside [0, {limit}]")
    return p.derivative(r, order)


def as_jet_function(u, order=None):
    """Normalize a profile or a jet-callable to ``r_jet -> Jet``."""
    if isinstance(u, RadialProfile):
        def fn(rj):
            return u.jet(rj.r0, rj.order if order is None else order)
        return fn
    if callable(u):
        return u
    const = float(u)
    return lambda rj: Jet.constant(const, rj.r0, rj.order)


# -- standard profiles ---------------------------------------------------

def flat_profile(max_order=MAX_DIM):
    return RadialProfile.analytic([], max_order=max_order, name="flat")


def round_sphere_profile(max_order=MAX_DIM):
    """``w = ln 2 - ln(1 + r^2)``: the unit round sphere pulled back by stereographic projection."""
    return RadialProfile.analytic([Term("power", float(np.log(2.0)), p=0.0),
                                   Term("log1p_sq", -1.0, 1.0)],
                                  max_order=max_order, name="round_sphere")


def w_a_profile(a, max_order=MAX_DIM):
    """``w_a = (a/2) ln(1 + r^2)``, asymptotic exponent ``a``."""
    return RadialProfile.analytic([Term("log1p_sq", a / 2.0, 1.0)], max_order=max_order,
                                  name=f"w_a({a:g})")


def cylinder_profile(max_order=MAX_DIM):
    """``w = -ln r`` on ``R^n \\ {0}``: the round cylinder."""
    return RadialProfile.analytic([Term("log", -1.0)], punctured_origin=True,
                                  max_order=max_order, name="cylinder")


# -- axisymmetric fields --------------------------------------------------

@dataclass(frozen=True, eq=False)
class SphericalField:
    """Axisymmetric ``w(r_i, theta_j)`` with ``theta_j = arccos(t_j)``."""

    n: int
    r: np.ndarray
    t: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    axisymmetric: bool = True

    def __post_init__(self):
        if self.values.shape != (len(self.r), len(self.t)):
            raise ValueError("values must have shape (len(r), len(t))")
        if np.any(self.weights <= 0) or abs(self.weights.sum() - 1.0) > 1e-12:
            raise ValueError("polar weights must be positive and sum to 1")
        if np.any(np.diff(self.r) <= 0):
            raise ValueError("radial grid must be strictly increasing")

    @property
    def theta(self):
        return np.arccos(self.t)

    @classmethod
    def from_function(cls, fn, r, n, nodes=48):
        """Sample ``fn(r, theta)`` (broadcasting) on ``r`` times a polar rule."""
        r = np.asarray(r, dtype=float)
        t, wts = polar_rule(n, nodes)
        vals = np.asarray(fn(r[:, None], np.arccos(t)[None, :]), dtype=float)
        vals = np.broadcast_to(vals, (len(r), len(t))).copy()
        return cls(n, r, np.array(t), np.array(wts), vals)

    @classmethod
    def from_profile(cls, p: RadialProfile, r, n, nodes=48, eps=0.0, harmonic="cos2",
                     center=2.0, width=1.0):
        """``w(r) + eps * g(cos theta) * eta(r)`` with a Gaussian ``eta`` about ``center``.

        A Gaussian keeps the ``n``-th radial derivatives of the perturbation
        moderate, unlike compactly supported exp bumps.
        """
        g = angular_mode(harmonic)

        def fn(rr, th):
            rr_b = np.broadcast_to(rr, np.broadcast_shapes(rr.shape, th.shape))
            base = p(rr_b)
            if eps == 0.0:
                return base
            eta = np.exp(-(((rr_b - center) / width) ** 2))
            return base + eps * g(np.cos(th)) * eta

        return cls.from_function(fn, r, n, nodes)


def angular_mode(name):
    modes = {"cos": lambda t: t, "cos2": lambda t: t * t, "none": lambda t: 0.0 * t}
    if name not in modes:
        raise ValueError(f"unknown angular mode {name!r}")
    return modes[name]


# -- profile documents -----------------------------------------

_TERM_SCHEMA = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["kind", "c", "rho"],
         "properties": {"kind": {"const": "log1p_sq"}, "c": {"type": "number"},
                        "rho": {"type": "number", "exclusiveMinimum": 0}}},
        {"type": "object", "additionalProperties": False, "required": ["kind", "c"],
         "properties": {"kind": {"const": "log"}, "c": {"type": "number"}}},
        {"type": "object", "additionalProperties": False, "required": ["kind", "c", "p"],
         "properties": {"kind": {"const": "power"}, "c": {"type": "number"},
                        "p": {"type": "number"}}},
    ]
}

PROFILE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["n", "profile"],
    "properties": {
        "n": {"type": "integer", "enum": [2, 4, 6, 8]},
        "profile": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["type", "terms"],
                 "properties": {"type": {"const": "analytic"},
                                "punctured_origin": {"type": "boolean"},
                                "terms": {"type": "array", "items": _TERM_SCHEMA}}},
                {"type": "object", "additionalProperties": False, "required": ["type", "r", "w"],
                 "properties": {"type": {"const": "sampled"},
                                "punctured_origin": {"type": "boolean"},
                                "r": {"type": "array", "items": {"type": "number"}, "minItems": 12},
                                "w": {"type": "array", "items": {"type": "number"}, "minItems": 12}}},
            ]
        },
        "angular": {
            "type": "object", "additionalProperties": False, "required": ["mode", "eps"],
            "properties": {"mode": {"enum": ["cos", "cos2", "none"]},
                           "eps": {"type": "number"},
                           "center": {"type": "number", "exclusiveMinimum": 0},
                           "width": {"type": "number", "exclusiveMinimum": 0}},
        },
    },
}

_validator = Draft202012Validator(PROFILE_SCHEMA)


@dataclass(frozen=True)
class ProfileDocument:
    n: int
    profile: RadialProfile
    angular: dict | None = None


def parse_profile(doc) -> ProfileDocument:
    """Validate a decoded profile document and build the profile."""
    errors = sorted(_validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        where = "/".join(str(p) for p in e.path) or "<root>"
        raise SchemaError(f"{where}: {e.message}")
    n = doc["n"]
    body = doc["profile"]
    punctured = body.get("punctured_origin", False)
    try:
        if body["type"] == "analytic":
            prof = RadialProfile.analytic(body["terms"], punctured)
        else:
            if len(body["r"]) != len(body["w"]):
                raise SchemaError("profile/r and profile/w differ in length")
            prof = RadialProfile.sampled(body["r"], body["w"], punctured, max_order=max(n, 4))
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"profile: {exc}") from exc
    return ProfileDocument(n, prof, doc.get("angular"))


def load_profile(path) -> ProfileDocument:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    return parse_profile(doc)
