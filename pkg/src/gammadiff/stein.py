"""Differential characterizations of the gamma difference law.

* second-order ODE satisfied by the density,
  x p'' + (x(b1-b2) + 2-a1-a2) p' + ((b1-b2 + a1 b2 - a2 b1) - x b1 b2) p = 0
* Stein identity, its adjoint,
  E[X g'' + (X(b2-b1) + a1+a2) g' + (a1 b2 - a2 b1 - X b1 b2) g] = 0
* first-order ODE of the characteristic function.

The Stein operator is obtained from the density ODE by integrating by parts
twice; that fixes the sign of the X g' coefficient as (b2 - b1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from . import gdd
from .errors import DomainError
from .gdd import GddParams
from .quadrature import QuadratureTask, SemiInfinite, integrate
from .specfun import SpecialValue


@dataclass(frozen=True)
class TestFunction:
    """g and its first two derivatives, with a growth class for admissibility.

    growth_class: ("bounded",), ("polynomial", degree) or ("sub_exponential", rate).
    """

    __test__ = False  # not a pytest class

    g: Callable
    g1: Callable
    g2: Callable
    growth_class: Tuple = ("bounded",)
    name: str = ""


def _const(c):
    return lambda x: np.full_like(np.asarray(x, dtype=float), c)


BATTERY = {
    "one": TestFunction(_const(1.0), _const(0.0), _const(0.0), ("polynomial", 0), "one"),
    "x": TestFunction(lambda x: np.asarray(x, dtype=float), _const(1.0), _const(0.0), ("polynomial", 1), "x"),
    "x2": TestFunction(lambda x: x * x, lambda x: 2.0 * x, _const(2.0), ("polynomial", 2), "x2"),
    "x3": TestFunction(lambda x: x ** 3, lambda x: 3.0 * x * x, lambda x: 6.0 * x, ("polynomial", 3), "x3"),
    "sin": TestFunction(np.sin, np.cos, lambda x: -np.sin(x), ("bounded",), "sin"),
    "cos": TestFunction(np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), ("bounded",), "cos"),
    "gauss": TestFunction(lambda x: np.exp(-x * x), lambda x: -2.0 * x * np.exp(-x * x),
                          lambda x: (4.0 * x * x - 2.0) * np.exp(-x * x), ("bounded",), "gauss"),
    "cauchy": TestFunction(lambda x: 1.0 / (1.0 + x * x), lambda x: -2.0 * x / (1.0 + x * x) ** 2,
                           lambda x: (6.0 * x * x - 2.0) / (1.0 + x * x) ** 3, ("bounded",), "cauchy"),
}


def power_function(k: int) -> TestFunction:
    """g(x) = x^k."""
    k = int(k)
    return TestFunction(lambda x: np.asarray(x, dtype=float) ** k,
                        lambda x: k * np.asarray(x, dtype=float) ** (k - 1) if k >= 1 else _const(0.0)(x),
                        lambda x: k * (k - 1) * np.asarray(x, dtype=float) ** (k - 2) if k >= 2 else _const(0.0)(x),
                        ("polynomial", k), f"x^{k}")


def check_admissible(params: GddParams, tf: TestFunction):
    gc = tf.growth_class
    kind = gc[0]
    if kind in ("bounded", "polynomial"):
        return
    if kind == "sub_exponential":
        rate = float(gc[1])
        if not rate < min(params.beta1, params.beta2):
            raise DomainError(f"test function grows like exp({rate}|x|); needs rate < min(beta1, beta2)")
        return
    raise DomainError(f"unknown growth class {gc!r}")


# ---------------------------------------------------------------------------
# density ODE
# ---------------------------------------------------------------------------


def ode_coefficients(params: GddParams, x):
    """(A, B, C) with A p'' + B p' + C p = 0."""
    p = GddParams.of(params)
    x = np.asarray(x, dtype=float)
    a = x
    b = x * (p.beta1 - p.beta2) + (2.0 - p.alpha1 - p.alpha2)
    c = (p.beta1 - p.beta2 + p.alpha1 * p.beta2 - p.alpha2 * p.beta1) - x * p.beta1 * p.beta2
    return a, b, c


def fd_derivatives(f: Callable, x: float, h0: Optional[float] = None):
    """(f, f', f'') at x by central differences with two Richardson levels.

    Steps h0, h0/2, h0/4 with h0 = 0.02 max(1, |x|), capped at |x|/4 so the
    stencil never crosses 0 (the density is not smooth there).
    """
    if h0 is None:
        h0 = 0.02 * max(1.0, abs(x))
        if x != 0.0:
            h0 = min(h0, abs(x) / 4.0)
    hs = np.array([h0, h0 / 2.0, h0 / 4.0])
    pts = np.concatenate([[x], x - hs, x + hs])
    v = np.asarray(f(pts), dtype=float)
    f0, fm, fp = v[0], v[1:4], v[4:7]
    d1 = (fp - fm) / (2.0 * hs)
    d2 = (fp - 2.0 * f0 + fm) / (hs * hs)

    def rich(d):
        r1 = (4.0 * d[1:] - d[:-1]) / 3.0
        return (16.0 * r1[1] - r1[0]) / 15.0

    return float(f0), rich(d1), rich(d2)


@dataclass(frozen=True)
class OdeResidual:
    x: float
    residual: float
    scale: float  # |A p''| + |B p'| + |C p|

    @property
    def scaled(self) -> float:
        return abs(self.residual) / self.scale if self.scale > 0 else abs(self.residual)


def ode_check(params: GddParams, x: float) -> OdeResidual:
    """Residual of the density ODE at x != 0 with p from the tricomi route."""
    p = GddParams.of(params)
    x = float(x)
    if x == 0.0 or not math.isfinite(x):
        raise DomainError("ODE residual is evaluated at finite x != 0 only")

    def dens(t):
        v, _, _ = gdd.pdf_array(p, t)
        return v

    f0, f1, f2 = fd_derivatives(dens, x)
    a, b, c = (float(v) for v in ode_coefficients(p, x))
    terms = (a * f2, b * f1, c * f0)
    return OdeResidual(x, math.fsum(terms), sum(abs(t) for t in terms))


def ode_residual(params: GddParams, x: float) -> float:
    return ode_check(params, x).residual


# ---------------------------------------------------------------------------
# Stein identity
# ---------------------------------------------------------------------------


def stein_terms(params: GddParams, tf: TestFunction, x):
    """The three summands of the Stein operator applied to g at x."""
    p = GddParams.of(params)
    x = np.asarray(x, dtype=float)
    t1 = x * tf.g2(x)
    t2 = (x * (p.beta2 - p.beta1) + p.alpha1 + p.alpha2) * tf.g1(x)
    t3 = (p.alpha1 * p.beta2 - p.alpha2 * p.beta1 - x * p.beta1 * p.beta2) * tf.g(x)
    return t1, t2, t3


@dataclass(frozen=True)
class SteinResult:
    value: float
    abs_error_estimate: float
    scale: float  # sum of E|term_i|
    converged: bool

    def as_special(self) -> SpecialValue:
        return SpecialValue(self.value, self.abs_error_estimate, self.converged)


def _weighted(v, d):
    """v * d with an underflowed density winning over an overflowed integrand."""
    with np.errstate(invalid="ignore", over="ignore"):
        return np.where(d == 0.0, 0.0, v * d)


def expectation_against(density: Callable, terms: Callable, mean: float = 0.0, rel_tol: float = 1e-12):
    """E[sum_i terms_i(X)] and sum_i E|terms_i(X)| for a density on the line, split at 0.

    ``density`` maps an array to density values; ``terms`` maps an array to a
    tuple of arrays.  Returns (value, abs_error, scale, converged).
    """
    total = 0.0
    err = 0.0
    scale = 0.0
    ok = True
    for side in (+1.0, -1.0):
        def f(u, side=side):
            x = side * u
            return _weighted(np.sum(terms(x), axis=0), density(x))

        def fa(u, side=side):
            x = side * u
            return _weighted(np.sum(np.abs(terms(x)), axis=0), density(x))

        bps = tuple(b for b in (side * mean,) if b > 0)
        ra = integrate(QuadratureTask(fa, SemiInfinite(0.0), rel_tol=1e-8, abs_tol=1e-300,
                                      breakpoints=bps, singular_endpoints=True, max_subdivisions=4000))
        # the signed integral nearly cancels: its tolerance is relative to the magnitude
        r = integrate(QuadratureTask(f, SemiInfinite(0.0), rel_tol=rel_tol,
                                     abs_tol=max(rel_tol * ra.value, 1e-300),
                                     breakpoints=bps, singular_endpoints=True, max_subdivisions=4000))
        total += r.value
        err += r.abs_error_estimate
        scale += ra.value
        ok = ok and r.converged
    return total, err, scale, ok


def stein_check(params: GddParams, tf: TestFunction) -> SteinResult:
    p = GddParams.of(params)
    check_admissible(p, tf)

    def dens(x):
        v, _, _ = gdd.pdf_array(p, x)
        return v

    val, err, scale, ok = expectation_against(dens, lambda x: np.stack(stein_terms(p, tf, x)), p.mean)
    return SteinResult(val, err, scale, ok)


def stein_expectation(params: GddParams, tf: TestFunction) -> SpecialValue:
    """E of the Stein operator applied to tf; zero for the gamma difference law."""
    return stein_check(params, tf).as_special()


# ---------------------------------------------------------------------------
# characteristic-function ODE
# ---------------------------------------------------------------------------


def charfn_ode_check(params: GddParams, t: float, h: float = 1e-3) -> float:
    """|(1 - it/b1)(1 + it/b2) phi'(t) - ((i a1/b1)(1 + it/b2) - (i a2/b2)(1 - it/b1)) phi(t)|.

    phi' by central differences with two Richardson levels.
    """
    p = GddParams.of(params)
    t = float(t)
    hs = np.array([h, h / 2.0, h / 4.0])
    ph = gdd.char_fn(p, t + hs)
    mh = gdd.char_fn(p, t - hs)
    d = (ph - mh) / (2.0 * hs)
    r1 = (4.0 * d[1:] - d[:-1]) / 3.0
    dphi = (16.0 * r1[1] - r1[0]) / 15.0
    phi = gdd.char_fn(p, t)
    lhs = (1 - 1j * t / p.beta1) * (1 + 1j * t / p.beta2) * dphi
    rhs = ((1j * p.alpha1 / p.beta1) * (1 + 1j * t / p.beta2)
           - (1j * p.alpha2 / p.beta2) * (1 - 1j * t / p.beta1)) * phi
    return float(abs(lhs - rhs))
