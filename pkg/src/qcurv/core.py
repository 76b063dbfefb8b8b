"""Dimension bookkeeping, error types, quadrature configuration and the
numerical helpers (polar rules, composite Gauss-Legendre, Richardson
extrapolation) shared by the other modules."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gamma, pi

import numpy as np
from scipy.special import roots_jacobi


class QCurvError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(QCurvError, ValueError):
    pass


class DomainError(QCurvError, ValueError):
    pass


class OrderError(QCurvError, ValueError):
    pass


class QuadratureError(QCurvError, ArithmeticError):
    pass


class IntegrabilityError(QCurvError, ArithmeticError):
    pass


class LimitError(QCurvError, ArithmeticError):
    pass


class ConsistencyError(QCurvError, ArithmeticError):
    pass


class StructureViolation(QCurvError, ArithmeticError):
    pass


class NotPolyharmonic(QCurvError, ValueError):
    pass


class ResolutionError(QCurvError, ValueError):
    pass


class PreconditionError(QCurvError, ValueError):
    pass


class DecompositionError(QCurvError, ValueError):
    pass


class CutoffError(QCurvError, ValueError):
    pass


class LevelSetError(QCurvError, ValueError):
    pass


class SchemaError(QCurvError, ValueError):
    pass


MAX_DIM = 8


def double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@dataclass(frozen=True)
class Dim:
    n: int
    m: int
    sphere_volume: float
    c_n: float


def make_dim(n) -> Dim:
    """Constants for even ``n`` in ``[2, 8]``.

    ``sphere_volume`` is ``|S^{n-1}|`` and ``c_n = 1 / (((n-2)!!)^2 |S^{n-1}|)``.
    """
    if isinstance(n, Dim):
        return n
    if isinstance(n, bool) or int(n) != n:
        raise DimensionError(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if n % 2 or not 2 <= n <= MAX_DIM:
        raise DimensionError(f"dimension must be even and in [2, {MAX_DIM}], got {n}")
    vol = 2.0 * pi ** (n / 2) / gamma(n / 2)
    c_n = 1.0 / (double_factorial(n - 2) ** 2 * vol)
    return Dim(n=n, m=n // 2, sphere_volume=vol, c_n=c_n)


@dataclass(frozen=True)
class QuadratureSpec:
    radial_nodes: int = 32
    angular_nodes: int = 48
    r_max: float = 100.0
    split_log: bool = True
    eps_quad: float = 1e-5
    extrap_order: int = 4

    def __post_init__(self):
        if min(self.radial_nodes, self.angular_nodes, self.extrap_order) < 4:
            raise ValueError("node counts and extrapolation order must be >= 4")
        if not self.eps_quad > 0:
            raise ValueError("eps_quad must be positive")
        if not self.r_max > 1:
            raise ValueError("r_max must exceed 1")


DEFAULT_QUAD = QuadratureSpec()


def to_jsonable(obj):
    """JSON-ready copy: numpy scalars and arrays to Python, tuples to lists, inf/nan to strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    return obj


# -- polar (sin^{n-2} theta) rules ---------------------------------------

@lru_cache(maxsize=None)
def polar_rule(n: int, nodes: int):
    """Gauss-Gegenbauer nodes ``t = cos(theta)`` and weights summing to 1.

    Exact for polynomials in ``cos(theta)`` of degree ``< 2 * nodes`` against
    the normalized measure ``sin^{n-2}(theta) d theta`` on ``(0, pi)``.
    """
    alpha = (n - 3) / 2.0
    t, w = roots_jacobi(nodes, alpha, alpha)
    w = w / w.sum()
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def polar_normalizer(n: int) -> float:
    """``int_0^pi sin^{n-2}(theta) d theta``."""
    return float(np.sqrt(pi) * gamma((n - 1) / 2) / gamma(n / 2))


# -- composite Gauss-Legendre -------------------------------------------

@lru_cache(maxsize=None)
def _gl(nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return x, w


def gl_nodes(edges, nodes: int):
    """Nodes and weights of the composite Gauss-Legendre rule over ``edges``."""
    edges = np.asarray(edges, dtype=float)
    x, w = _gl(nodes)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    pts = (a + b) * 0.5 + half * x[None, :]
    wts = half * w[None, :]
    return pts.ravel(), wts.ravel()


def composite_gl(fn, edges, nodes: int):
    """Integrate a vectorized ``fn`` over the panels ``edges``.

    Returns ``(value, error_estimate)``; the estimate compares against the
    rule with every panel bisected.
    """
    edges = np.asarray(edges, dtype=float)
    pts, wts = gl_nodes(edges, nodes)
    coarse = float(np.dot(wts, fn(pts)))
    mids = 0.5 * (edges[:-1] + edges[1:])
    fine_edges = np.sort(np.concatenate([edges, mids]))
    pts, wts = gl_nodes(fine_edges, nodes)
    fine = float(np.dot(wts, fn(pts)))
    return fine, abs(fine - coarse)


def geometric_edges(lo: float, hi: float, per_decade: int = 6, include_zero=True, extra=()):
    """Panel edges, geometric on ``[lo, hi]``, optionally with ``[0, lo]`` prepended."""
    decades = max(np.log10(hi / lo), 1e-12)
    k = max(int(np.ceil(decades * per_decade)), 1)
    edges = np.geomspace(lo, hi, k + 1)
    if include_zero:
        edges = np.concatenate([[0.0], edges])
    if len(extra):
        extra = np.asarray([e for e in extra if edges[0] < e < edges[-1]], dtype=float)
        edges = np.unique(np.concatenate([edges, extra]))
    return edges


# -- Richardson extrapolation -------------------------------------------

@dataclass(frozen=True)
class Extrapolation:
    value: float
    error: float
    samples: tuple
    radii: tuple


def richardson_limit(fn, r0: float, toward: str = "infinity", *, ratio: float = 2.0,
                     levels: int = 8, order: int = 4, tol: float | None = None):
    """Limit of ``fn(r)`` as ``r -> infinity`` (or ``0``) along ``r0 * ratio**(+-k)``.

    The error is modelled as a power series in ``h = 1/r`` (or ``h = r``);
    the tableau is eliminated up to ``order`` terms. The reported error is
    the change between the last two diagonal estimates. With ``tol`` set, a
    larger error raises :class:`LimitError`.
    """
    if toward not in ("infinity", "origin"):
        raise ValueError("toward must be 'infinity' or 'origin'")
    sign = 1 if toward == "infinity" else -1
    radii = r0 * ratio ** (sign * np.arange(levels))
    vals = np.asarray(fn(radii), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise LimitError(f"non-finite samples while extrapolating toward {toward}")
    order = min(order, levels - 1)
    table = [vals.copy()]
    for j in range(1, order + 1):
        prev = table[-1]
        fac = ratio ** j
        table.append(prev[1:] + (prev[1:] - prev[:-1]) / (fac - 1.0))
    best = table[-1]
    value = float(best[-1])
    if len(best) > 1:
        err = float(abs(best[-1] - best[-2]))
    else:
        err = float(abs(table[-2][-1] - table[-2][-2]))
    if tol is not None and not err <= tol:
        raise LimitError(f"extrapolation toward {toward} did not converge (change {err:.3g} > {tol:.3g})")
    return Extrapolation(value, err, tuple(vals.tolist()), tuple(radii.tolist()))
