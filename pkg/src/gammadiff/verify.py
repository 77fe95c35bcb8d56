"""Cross-route verification suite for one gamma difference parameter set.

Every check compares two independently computed quantities against a
tolerance.  ``tol_scale`` multiplies all tolerances; a tiny value (a
corrupted tolerance) makes the suite fail, which exercises the failure path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional

import numpy as np

from . import gdd, moments, stein
from .errors import ConvergenceError, DomainError
from .gdd import GddParams

X_GRID = (-3.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 3.0)
ODE_GRID = tuple(s * v for v in np.geomspace(0.1, 5.0, 4) for s in (1.0, -1.0))
B_GRID = (0.5, 1.3, 2.0, 3.7)
T_GRID = (0.0, 0.5, 1.0, 2.0)
K_MAX = 10


@dataclass(frozen=True)
class Check:
    name: str
    error: float  # already relative or scaled, as the check defines
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return math.isfinite(self.error) and self.error <= self.tolerance


def _rel(a: float, b: float, floor: float = 0.0) -> float:
    return abs(a - b) / max(abs(b), floor, 1e-300)


def _guard(name: str, tol: float, fn: Callable[[], Check]) -> Check:
    """Turn evaluation failures into failed checks."""
    try:
        return fn()
    except (DomainError, ConvergenceError, ArithmeticError) as exc:
        return Check(name, math.inf, tol, f"{type(exc).__name__}: {exc}")


def iter_checks(params: GddParams, tol_scale: float = 1.0, quick: bool = False) -> Iterator[Check]:
    """Yield checks one at a time so callers can stream them.

    quick skips the quadrature-heavy checks (Stein battery, quadrature moments).
    """
    p = GddParams.of(params)
    s = float(tol_scale)

    # normalization
    def norm():
        m = gdd.total_mass(p)
        return Check("normalization", abs(m.value - 1.0), 1e-8 * s)
    yield _guard("normalization", 1e-8 * s, norm)

    # density routes
    routes = ["convolution"] + (["fourier"] if p.shape_sum > 1.0 else [])
    for x in X_GRID:
        for r in routes:
            name = f"pdf tricomi~{r} x={x:g}"

            def cmp(x=x, r=r, name=name):
                a = gdd.pdf(p, x, "tricomi")
                b = gdd.pdf(p, x, r)
                if not b.converged:
                    raise ConvergenceError(f"{r} route did not converge")
                return Check(name, _rel(b.value, a.value), 1e-6 * s)
            yield _guard(name, 1e-6 * s, cmp)

    # value at the origin
    if p.shape_sum > 1.0:
        def zero():
            a = gdd.pdf_at_zero(p).value
            b = gdd.pdf(p, 0.0, "convolution").value
            return Check("pdf at zero closed form~convolution", _rel(b, a), 1e-6 * s)
        yield _guard("pdf at zero closed form~convolution", 1e-6 * s, zero)

    # integer moments
    def four_way():
        rec = moments.moments_recurrence(p, K_MAX)
        worst = 0.0
        for k in range(K_MAX + 1):
            ref = moments.moment_binomial_oracle(p, k).value
            floor = 1e-15 * moments.moment_abs_scale(p, k)
            vals = (rec[k].value, moments.moment_closed_form(p, k, "first").value,
                    moments.moment_closed_form(p, k, "second").value)
            worst = max(worst, max(_rel(v, ref, floor) for v in vals))
        return Check(f"moments four routes k<={K_MAX}", worst, 1e-10 * s)
    yield _guard("moments four routes", 1e-10 * s, four_way)

    if not quick:
        def quad_moments():
            worst = 0.0
            for k in range(K_MAX + 1):
                ref = moments.moment_binomial_oracle(p, k).value
                q = moments.moment_quadrature(p, k).value
                worst = max(worst, _rel(q, ref, moments.abs_moment(p, k + 1).value))
            return Check(f"moments quadrature k<={K_MAX}", worst, 1e-6 * s)
        yield _guard("moments quadrature", 1e-6 * s, quad_moments)

    # absolute moments
    lo = max(0.0, 1.0 - p.shape_sum)
    for b in B_GRID:
        if b <= lo:
            continue
        name = f"abs moment closed form~quadrature b={b:g}"

        def absm(b=b, name=name):
            a = moments.abs_moment(p, b).value
            q = moments.abs_moment_quadrature(p, b).value
            return Check(name, _rel(q, a), 1e-6 * s)
        yield _guard(name, 1e-6 * s, absm)
    yield _guard("abs moment b=1", 1e-9 * s,
                 lambda: Check("abs moment b=1", abs(moments.abs_moment(p, 1.0).value - 1.0), 1e-9 * s))

    def even():
        worst = 0.0
        for k in (0, 2, 4, 6, 8):
            m = moments.moment_closed_form(p, k, "second").value
            worst = max(worst, _rel(moments.abs_moment_connection_form(p, k + 1).value, m))
        return Check("even abs moments~integer moments", worst, 1e-9 * s)
    yield _guard("even abs moments", 1e-9 * s, even)

    # density ODE
    if p.shape_sum > 1.0:
        def ode():
            return Check("density ODE scaled residual", max(stein.ode_check(p, x).scaled for x in ODE_GRID), 1e-6 * s)
        yield _guard("density ODE", 1e-6 * s, ode)

    # Stein identity
    if not quick:
        for gname, tf in stein.BATTERY.items():
            name = f"stein g={gname}"

            def st(tf=tf, name=name):
                r = stein.stein_check(p, tf)
                if not r.converged:
                    raise ConvergenceError("Stein expectation did not converge")
                return Check(name, abs(r.value) / r.scale, 1e-7 * s)
            yield _guard(name, 1e-7 * s, st)

    # characteristic function ODE
    yield _guard("charfn ODE", 1e-8 * s,
                 lambda: Check("charfn ODE", max(stein.charfn_ode_check(p, t) for t in T_GRID), 1e-8 * s))


def run_suite(params: GddParams, tol_scale: float = 1.0, quick: bool = False) -> List[Check]:
    return list(iter_checks(params, tol_scale, quick))


def all_passed(checks: List[Check]) -> bool:
    return all(c.passed for c in checks)
