"""Truncated Taylor arithmetic in the radial variable.

A :class:`Jet` holds the Taylor coefficients ``c[k] = u^(k)(r0) / k!`` of a
function of one variable about an array of expansion points ``r0``. Every
radial operator in the package (flat and curved Laplacians, the Paneitz
operator, level-set integrands) is written once in terms of jets, which
gives exact derivatives of analytic profiles and an exact limit at ``r = 0``
through :meth:`Jet.div_r`.
"""

from __future__ import annotations

from math import comb, factorial

import numpy as np


def _real(x):
    """Float array, keeping extended or arbitrary (object) precision when the input carries it."""
    x = np.asarray(x)
    return x if x.dtype in (np.longdouble, object) else x.astype(float)


def _ufunc(name, a):
    """``np.<name>``, routed through mpmath for arrays of mpmath numbers."""
    if a.dtype != object:
        return getattr(np, name)(a)
    import mpmath

    return np.frompyfunc(getattr(mpmath, name), 1, 1)(a)


# odd jets closer to the origin than this use the tail form in div_r
TAIL_RADIUS = 0.05


class Jet:
    """Taylor coefficients of order ``K`` about the points ``r0``.

    ``c`` has shape ``(K + 1,) + r0.shape``.
    """

    __slots__ = ("c", "r0", "parity")
    __array_priority__ = 100  # make ndarray * Jet dispatch to Jet.__rmul__

    def __init__(self, c, r0, parity=None):
        self.c = _real(c)
        self.r0 = _real(r0)
        # +1 / -1: the jet expands an even / odd function analytic near r = 0
        self.parity = parity

    # -- construction -------------------------------------------------
    @classmethod
    def variable(cls, r, order):
        r = _real(r)
        c = np.zeros((order + 1,) + r.shape, dtype=r.dtype)
        c[0] = r
        if order >= 1:
            c[1] = 1.0
        return cls(c, r, -1)

    @classmethod
    def constant(cls, value, r, order):
        r = _real(r)
        c = np.zeros((order + 1,) + r.shape, dtype=r.dtype)
        c[0] = value
        return cls(c, r, 1)

    @classmethod
    def from_derivatives(cls, derivs, r, parity=None):
        derivs = np.asarray(derivs, dtype=float)
        scale = np.array([1.0 / factorial(k) for k in range(derivs.shape[0])])
        scale = scale.reshape((-1,) + (1,) * (derivs.ndim - 1))
        return cls(derivs * scale, r, parity)

    # -- access -------------------------------------------------------
    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, k):
        if k > self.order:
            raise ValueError(f"jet of order {self.order} has no derivative {k}")
        return self.c[k] * factorial(k)

    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        return Jet(self.c[: order + 1], self.r0, self.parity)

    def _lift(self, other):
        if isinstance(other, Jet):
            k = min(self.order, other.order)
            return self.truncate(k), other.truncate(k)
        c = np.zeros_like(self.c)
        c[0] = other
        return self, Jet(c, self.r0, 1)

    # -- arithmetic ---------------------------------------------------
    def __neg__(self):
        return Jet(-self.c, self.r0, self.parity)

    def __add__(self, other):
        if not isinstance(other, Jet):
            c = self.c.copy()
            c[0] = c[0] + other
            return Jet(c, self.r0, self.parity if self.parity == 1 else None)
        a, b = self._lift(other)
        return Jet(a.c + b.c, a.r0, a.parity if a.parity == b.parity else None)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * _real(other), self.r0, self.parity)
        a, b = self._lift(other)
        K = a.order
        out = np.zeros(np.broadcast_shapes(a.c.shape, b.c.shape), dtype=np.result_type(a.c, b.c))
        for k in range(K + 1):
            acc = out[k]
            for j in range(k + 1):
                acc = acc + a.c[j] * b.c[k - j]
            out[k] = acc
        both = a.parity is not None and b.parity is not None
        return Jet(out, a.r0, a.parity * b.parity if both else None)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / _real(other), self.r0, self.parity)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Jet.constant(1.0, self.r0, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- elementary functions ----------------------------------------
    def _even(self):
        return 1 if self.parity == 1 else None

    def reciprocal(self):
        a = self.c
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for k in range(1, self.order + 1):
            acc = np.zeros_like(a[0])
            for j in range(1, k + 1):
                acc = acc + a[j] * b[k - j]
            b[k] = -acc * b[0]
        return Jet(b, self.r0, self._even())

    def exp(self):
        a = self.c
        b = np.zeros_like(a)
        b[0] = _ufunc("exp", a[0])
        for k in range(1, self.order + 1):
            acc = np.zeros_like(a[0])
            for j in range(1, k + 1):
                acc = acc + j * a[j] * b[k - j]
            b[k] = acc / k
        return Jet(b, self.r0, self._even())

    def log(self):
        a = self.c
        b = np.zeros_like(a)
        b[0] = _ufunc("log", a[0])
        for k in range(1, self.order + 1):
            acc = np.zeros_like(a[0])
            for j in range(1, k):
                acc = acc + j * b[j] * a[k - j]
            b[k] = (a[k] - acc / k) / a[0]
        return Jet(b, self.r0, self._even())

    # -- calculus -----------------------------------------------------
    def deriv(self):
        """d/dr, lowering the order by one."""
        if self.order < 1:
            raise ValueError("jet of order 0 cannot be differentiated")
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * self.r0.ndim)
        return Jet(self.c[1:] * k, self.r0, None if self.parity is None else -self.parity)

    def div_r(self):
        """u / r, lowering the order by one.

        At ``r0 == 0`` the jet must vanish there (odd radial quantities such
        as ``u'``), and the quotient is the shifted series. Elsewhere the
        ordinary product with the series of ``1/r`` is used; for odd jets
        near the origin that product cancels catastrophically, so each
        coefficient instead comes from the tail ``-sum_{j>k} c_j (-r0)^j``
        whenever its truncation bound beats the round-off bound.
        """
        if self.order < 1:
            raise ValueError("jet of order 0 cannot be divided by r")
        K = self.order - 1
        at_origin = self.r0 == 0.0
        r_safe = np.where(at_origin, 1.0, self.r0)
        inv = np.zeros((K + 1,) + self.r0.shape, dtype=self.c.dtype)
        parity = 1 if self.parity == -1 else None
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            for k in range(K + 1):
                inv[k] = (-1.0) ** k / r_safe ** (k + 1)
            generic = (self.truncate(K) * Jet(inv, self.r0)).c
            if parity == 1:
                generic = self._odd_tail(generic, r_safe)
        if np.any(at_origin):
            generic = np.where(at_origin, self.c[1:], generic)
        return Jet(generic, self.r0, parity)

    def _odd_tail(self, generic, r0):
        c, K = self.c, self.order
        powers = np.stack([(-r0) ** j for j in range(K + 1)])
        noise = np.finfo(float).eps * np.sum(np.abs(c * powers), axis=0)
        out = generic.copy()
        for k in range(K):
            # u(0) = 0, so the partial sum up to k equals minus the tail
            coef = sum(c[j] * powers[j - k - 1] for j in range(k + 1, K + 1))
            trunc = np.maximum(np.abs(c[K]), np.abs(c[K - 1])) * np.abs(r0) ** (K - k)
            rounding = noise / np.abs(r0) ** (k + 1)
            use = ((trunc < rounding) | ~np.isfinite(generic[k])) & (np.abs(r0) < TAIL_RADIUS)
            out[k] = np.where(use, coef, generic[k])
        return out


def radial_laplacian(u: Jet, n: int) -> Jet:
    """Flat Laplacian of a radial function on R^n: u'' + (n-1) u'/r."""
    du = u.deriv()
    return du.deriv() + (n - 1) * du.div_r()


def poly_step(x: Jet, smoothness: int = 8) -> Jet:
    """Polynomial step of class ``C^smoothness``: 0 for x <= 0, 1 for x >= 1.

    Evaluated in Bernstein form, ``sum_{j > k} C(2k+1, j) x^j (1-x)^(2k+1-j)``,
    whose terms are all non-negative; its derivatives stay moderate, which
    keeps high-order operators applied to cutoffs well conditioned.
    """
    v = x.value
    inside = (v > 0.0) & (v < 1.0)
    xs = Jet(np.where(inside, x.c, 0.0), x.r0)
    xs.c[0] = np.where(inside, v, 0.5)
    ys = 1.0 - xs
    k = smoothness
    N = 2 * k + 1
    out = Jet.constant(0.0, x.r0, x.order)
    for j in range(k + 1, N + 1):
        out = out + comb(N, j) * (xs**j) * (ys ** (N - j))
    c = np.where(inside, out.c, 0.0)
    c[0] = np.where(inside, out.c[0], np.where(v >= 1.0, 1.0, 0.0))
    return Jet(c, x.r0)
