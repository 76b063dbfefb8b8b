"""Reference profiles and the seeded generator of random complete profiles."""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .core import DEFAULT_QUAD, QuadratureSpec
from .profiles import RadialProfile, Term
from .radial import scalar_nonnegative


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    profile: RadialProfile
    a: float | None = None  # asymptotic exponent at infinity, when known in closed form


def _analytic(name, terms, punctured=False):
    return RadialProfile.analytic(terms, punctured_origin=punctured, name=name)


def w_a_entry(a):
    return CorpusEntry(f"w_a({a:g})", _analytic(f"w_a({a:g})", [Term("log1p_sq", a / 2)]), a)


def corpus():
    """Analytic profiles covering the equality cases, strict cases and punctures."""
    entries = [
        CorpusEntry("flat", _analytic("flat", []), 0.0),
        CorpusEntry("round_sphere", _analytic(
            "round_sphere", [Term("power", log(2.0), p=0.0), Term("log1p_sq", -1.0)]), -2.0),
        *(w_a_entry(a) for a in (-1.0, -0.75, -0.5, -0.25)),
        CorpusEntry("two_scale", _analytic(
            "two_scale", [Term("log1p_sq", -0.3, rho=0.7), Term("log1p_sq", -0.2, rho=1.6)]), -1.0),
        CorpusEntry("three_scale", _analytic(
            "three_scale", [Term("log1p_sq", -0.4, rho=0.6), Term("log1p_sq", 0.15, rho=1.3),
                            Term("log1p_sq", -0.1, rho=1.9)]), -0.7),
        CorpusEntry("cylinder", _analytic("cylinder", [Term("log", -1.0)], punctured=True), -1.0),
        CorpusEntry("puncture_mix", _analytic(
            "puncture_mix", [Term("log", -2.0), Term("log1p_sq", 0.5)], punctured=True), -1.0),
    ]
    return entries


def smooth_corpus():
    """Entries smooth at the origin, i.e. metrics on all of ``R^n``."""
    return [e for e in corpus() if not e.profile.punctured_origin]


def a2_near_end(p: RadialProfile, dim, quad: QuadratureSpec = DEFAULT_QUAD, count=33):
    """``R >= 0`` on ``[R_max / 2, R_max]``."""
    return scalar_nonnegative(p, dim, np.linspace(quad.r_max / 2, quad.r_max, count))


def random_profile(rng: np.random.Generator, dim=4, quad: QuadratureSpec = DEFAULT_QUAD,
                   max_terms=3, c_max=1.5, rho_range=(0.5, 2.0), max_tries=10_000):
    """Random mix of ``c ln(1 + r^2/rho^2)`` terms, rejection-sampled for
    completeness (``a = 2 sum c >= -1``) and ``R >= 0`` near infinity."""
    for _ in range(max_tries):
        k = int(rng.integers(1, max_terms + 1))
        cs = rng.uniform(-c_max, c_max, size=k)
        rhos = rng.uniform(*rho_range, size=k)
        if 2.0 * cs.sum() < -1.0:
            continue
        p = RadialProfile.analytic([Term("log1p_sq", float(c), rho=float(r)) for c, r in zip(cs, rhos)],
                                   name="random")
        if a2_near_end(p, dim, quad):
            return p
    raise RuntimeError("rejection sampling found no admissible profile")


def random_profiles(count, seed=0, dim=4, quad: QuadratureSpec = DEFAULT_QUAD):
    rng = np.random.default_rng(seed)
    return [random_profile(rng, dim, quad) for _ in range(count)]
