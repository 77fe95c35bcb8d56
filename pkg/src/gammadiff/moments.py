"""Integer moments, absolute continuous moments and the principal-value E(1/X)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import gdd
from .errors import DomainError
from .gdd import GddParams
from .quadrature import Finite, QuadratureTask, SemiInfinite, integrate
from .specfun import EPS, gamma_ratio, gauss_2f1, lgamma_sign, pochhammer

# b + alpha2 closer than this (in sin) to an integer: connection form refused
SIN_REFUSE = 1e-8
PV_DELTAS = (1e-2, 1e-3, 1e-4)
PV_EPSILONS = (0.1, 0.05, 0.025)


@dataclass(frozen=True)
class MomentReport:
    order: float
    value: float
    route: str
    abs_error_estimate: Optional[float] = None


def _check_order(k):
    if int(k) != k or k < 0:
        raise DomainError(f"moment order must be a non-negative integer, got {k!r}")
    return int(k)


# ---------------------------------------------------------------------------
# integer moments
# ---------------------------------------------------------------------------


def moments_recurrence(params: GddParams, k_max: int) -> List[MomentReport]:
    """m_0 .. m_{k_max} from the three-term recurrence, m_0 = 1."""
    p = GddParams.of(params)
    k_max = _check_order(k_max)
    a1, b1, a2, b2 = p.as_tuple()
    m = [1.0]
    prev = 0.0
    for k in range(k_max):
        nxt = ((k * (b2 - b1) + (a1 * b2 - a2 * b1)) * m[k] + k * (k - 1 + a1 + a2) * prev) / (b1 * b2)
        prev = m[k]
        m.append(nxt)
    return [MomentReport(k, v, "recurrence") for k, v in enumerate(m)]


def moment_closed_form(params: GddParams, k: int, which: str = "first") -> MomentReport:
    """Hypergeometric-polynomial form of m_k; ``which`` selects the form.

    first:  (alpha1)_k / beta1^k 2F1(-k, alpha2; -(alpha1+k-1); -beta1/beta2)
    second: (-1)^k (alpha2)_k / beta2^k 2F1(-k, alpha1; -(alpha2+k-1); -beta2/beta1)
    """
    p = GddParams.of(params)
    k = _check_order(k)
    if which == "first":
        a1, b1, a2, b2, sgn, route = p.alpha1, p.beta1, p.alpha2, p.beta2, 1.0, "closed_form_1"
    elif which == "second":
        a1, b1, a2, b2, sgn, route = p.alpha2, p.beta2, p.alpha1, p.beta1, (-1.0) ** k, "closed_form_2"
    else:
        raise DomainError(f"which must be 'first' or 'second', got {which!r}")
    if k == 0:
        return MomentReport(0, 1.0, route)
    f = gauss_2f1(-k, a2, -(a1 + k - 1.0), -b1 / b2)
    return MomentReport(k, sgn * pochhammer(a1, k) / b1 ** k * f.value, route)


def _gamma_moment(alpha, beta, l):
    return pochhammer(alpha, l) / beta ** l


def moment_binomial_oracle(params: GddParams, k: int) -> MomentReport:
    """sum_l C(k,l) (-1)^l E X1^{k-l} E X2^l with exact compensated summation."""
    p = GddParams.of(params)
    k = _check_order(k)
    terms = [math.comb(k, l) * (-1.0) ** l * _gamma_moment(p.alpha1, p.beta1, k - l)
             * _gamma_moment(p.alpha2, p.beta2, l) for l in range(k + 1)]
    return MomentReport(k, math.fsum(terms), "binomial_sum")


def moment_abs_scale(params: GddParams, k: int) -> float:
    """E (X1 + X2)^k, the sum of the binomial terms' magnitudes.

    A natural magnitude for m_k when cancellation makes m_k itself small
    (odd moments of near-symmetric laws).
    """
    p = GddParams.of(params)
    k = _check_order(k)
    return math.fsum(math.comb(k, l) * _gamma_moment(p.alpha1, p.beta1, k - l)
                     * _gamma_moment(p.alpha2, p.beta2, l) for l in range(k + 1))


def _half_line_expectation(p: GddParams, weight, side: int, singular=True, rel_tol=1e-11):
    """int over x>0 (side=+1) or x<0 (side=-1) of weight(x) p(x) dx."""
    q = p if side > 0 else p.swapped()

    def f(x):
        v, _, _ = gdd.pdf_array(q, x)
        return weight(side * x) * v

    bps = tuple(b for b in (side * p.mean,) if b > 0)
    return integrate(QuadratureTask(f, SemiInfinite(0.0), rel_tol=rel_tol, abs_tol=1e-15,
                                    breakpoints=bps, singular_endpoints=singular,
                                    max_subdivisions=4000))


def moment_quadrature(params: GddParams, k: int) -> MomentReport:
    """int x^k p(x) dx by adaptive quadrature, split at 0."""
    p = GddParams.of(params)
    k = _check_order(k)
    w = lambda x: x ** k  # noqa: E731
    r1 = _half_line_expectation(p, w, +1)
    r2 = _half_line_expectation(p, w, -1)
    return MomentReport(k, r1.value + r2.value, "quadrature",
                        r1.abs_error_estimate + r2.abs_error_estimate)


# ---------------------------------------------------------------------------
# absolute continuous moments
# ---------------------------------------------------------------------------


def _check_b(p: GddParams, b: float):
    b = float(b)
    lo = max(0.0, 1.0 - p.alpha1 - p.alpha2)
    if not (math.isfinite(b) and b > lo):
        raise DomainError(f"absolute moment needs b > {lo!r}, got {b!r}")
    return b


def _log_abs_prefactor(p: GddParams, b: float) -> float:
    """log of beta1^a1 beta2^a2 / (beta1+beta2)^(a1+a2+b-1)."""
    return (p.alpha1 * math.log(p.beta1) + p.alpha2 * math.log(p.beta2)
            - (p.alpha1 + p.alpha2 + b - 1.0) * math.log(p.beta1 + p.beta2))


def _half_moment_parts(p: GddParams, b: float):
    """E(X^{b-1}; X > 0) as (value, abs_error); requires b > 0 and b + a1 + a2 > 1."""
    a1, b1, a2, b2 = p.as_tuple()
    c = b + a1 + a2 - 1.0
    if not (b > 0 and c > 0):
        raise DomainError("half-line moment requires b > 0 and b + alpha1 + alpha2 > 1")
    z = b2 / (b1 + b2)
    f = gauss_2f1(b, c, b + a2, z)
    if not f.converged:
        raise DomainError("2F1 series did not converge")
    logv = _log_abs_prefactor(p, b) + math.lgamma(b) + math.lgamma(c) - math.lgamma(a1) - math.lgamma(b + a2)
    scale = math.exp(logv)
    return scale * f.value, scale * f.abs_error_estimate + 8.0 * EPS * abs(scale * f.value)


def half_moment(params: GddParams, b: float, side: int = +1) -> MomentReport:
    """E(|X|^{b-1}; sign(X) = side), the one-sided pieces of the absolute moment."""
    p = GddParams.of(params)
    q = p if side > 0 else p.swapped()
    v, e = _half_moment_parts(q, float(b))
    return MomentReport(float(b) - 1.0, v, "closed_form", e)


def abs_moment(params: GddParams, b: float) -> MomentReport:
    """E|X|^{b-1} from the symmetrized two-term 2F1 expression."""
    p = GddParams.of(params)
    b = _check_b(p, b)
    v1, e1 = _half_moment_parts(p, b)
    v2, e2 = _half_moment_parts(p.swapped(), b)
    return MomentReport(b - 1.0, v1 + v2, "closed_form", e1 + e2)


def abs_moment_quadrature(params: GddParams, b: float) -> MomentReport:
    p = GddParams.of(params)
    b = _check_b(p, b)
    w = lambda x: np.abs(x) ** (b - 1.0)  # noqa: E731
    r1 = _half_line_expectation(p, w, +1)
    r2 = _half_line_expectation(p, w, -1)
    return MomentReport(b - 1.0, r1.value + r2.value, "quadrature",
                        r1.abs_error_estimate + r2.abs_error_estimate)


def _f21_integer_limit(a: float, m: int, k: int, z: float):
    """lim_{s -> m} 2F1(a, 1-s; 1-k-s; z) for integers m >= 1, k >= 0, |z| < 1.

    Terms m <= l < k+m vanish; for l >= k+m the two vanishing factors cancel,
    leaving (a)_l z^l / l! (-1)^k (m-1)! (l-m)! / ((k+m-1)! (l-k-m)!).
    """
    terms = []
    t = 1.0
    for l in range(m):
        terms.append(t)
        if l == m - 1:
            break
        t *= (a + l) * (1.0 - m + l) / ((1.0 - k - m + l) * (l + 1.0)) * z
    l0 = k + m
    logt = (math.lgamma(a + l0) - math.lgamma(a) if a > 0 else None)
    if logt is None:
        t = pochhammer(a, l0)
    else:
        t = math.exp(logt)
    t *= z ** l0 / math.factorial(l0) * (-1.0) ** k * math.factorial(m - 1) * math.factorial(k) \
        / math.factorial(k + m - 1)
    l = l0
    tail = []
    run = 0.0
    while l < l0 + 100000 and t != 0.0:
        tail.append(t)
        run += t
        t *= (a + l) * z / (l + 1.0) * (l + 1.0 - m) / (l + 1.0 - k - m)
        l += 1
        if abs(t) < 1e-17 * abs(run) and l > l0 + a:
            break
    vals = terms + tail
    s = math.fsum(vals)
    return s, 4.0 * EPS * math.fsum(abs(v) for v in vals)


def abs_moment_connection_form(params: GddParams, b: float) -> MomentReport:
    """E|X|^{b-1} from the z -> 1-z connection rewrite (argument beta2/(beta1+beta2) only).

    For b - 1 = k an even integer the first term's prefactor vanishes and the
    reduced single-2F1 form is evaluated; when alpha2 is itself an integer that
    2F1 is taken as its limit in alpha2 (the printed parameters hit a 0/0).
    """
    p = GddParams.of(params)
    b = _check_b(p, b)
    a1, b1, a2, b2 = p.as_tuple()
    z = b2 / (b1 + b2)
    k = b - 1.0
    if k >= 0 and k == math.floor(k) and int(k) % 2 == 0:
        k = int(k)
        m = round(a2)
        logpre = a1 * math.log(b1) - k * math.log(b2) - a1 * math.log(b1 + b2)
        ratio = gamma_ratio([k + a2], [a2])
        if a2 == m:
            f, fe = _f21_integer_limit(a1, int(m), k, z)
        else:
            if abs(a2 - m) < 1e-6:
                raise DomainError("alpha2 within 1e-6 of an integer: reduced form is ill-conditioned; "
                                  "use abs_moment")
            r = gauss_2f1(a1, 1.0 - a2, 1.0 - k - a2, z)
            f, fe = r.value, r.abs_error_estimate
        scale = math.exp(logpre) * ratio
        return MomentReport(float(k), scale * f, "connection_form", abs(scale) * fe)
    sden = math.sin(math.pi * (b + a2))
    if abs(sden) < SIN_REFUSE:
        raise DomainError("sin(pi (b + alpha2)) vanishes: connection form refused; use abs_moment")
    c = b + a1 + a2 - 1.0
    f1 = gauss_2f1(b, c, b + a2, z)
    f2 = gauss_2f1(a1, 1.0 - a2, 2.0 - b - a2, z)
    logpre = _log_abs_prefactor(p, b)
    pre1 = math.exp(logpre + math.lgamma(b) + math.lgamma(c) - math.lgamma(a1) - math.lgamma(b + a2))
    pre1 *= 1.0 + math.sin(math.pi * a2) / sden
    lg, sg = lgamma_sign(b + a2 - 1.0)
    pre2 = sg * math.exp(logpre + lg - math.lgamma(a2) + (1.0 - b - a2) * math.log(z))
    val = pre1 * f1.value + pre2 * f2.value
    err = abs(pre1) * f1.abs_error_estimate + abs(pre2) * f2.abs_error_estimate \
        + 8.0 * EPS * (abs(pre1 * f1.value) + abs(pre2 * f2.value))
    return MomentReport(b - 1.0, val, "connection_form", err)


# ---------------------------------------------------------------------------
# principal-value first negative moment
# ---------------------------------------------------------------------------


def _poly_extrapolate(h, v):
    """Value at h = 0 of the polynomial through (h_i, v_i)."""
    h = np.asarray(h, dtype=float)
    v = np.asarray(v, dtype=float)
    vand = np.vander(h, len(h), increasing=True)
    return float(np.linalg.solve(vand, v)[0])


def _pv_tail(p: GddParams, delta: float):
    """int_delta^inf (p(x) - p(-x)) / x dx."""
    q = p.swapped()

    def f(x):
        v1, _, _ = gdd.pdf_array(p, x)
        v2, _, _ = gdd.pdf_array(q, x)
        return (v1 - v2) / x

    bps = tuple(b for b in (abs(p.mean),) if b > delta)
    return integrate(QuadratureTask(f, SemiInfinite(delta), rel_tol=1e-12, abs_tol=1e-15,
                                    breakpoints=bps, max_subdivisions=4000))


def pv_inverse_moment(params: GddParams, deltas=PV_DELTAS) -> MomentReport:
    """PV E(1/X) = lim_{delta->0} int_{|x|>delta} p(x)/x dx.

    The truncated integral is evaluated at each delta and extrapolated by
    the polynomial through the points; the remainder is linear in delta at
    leading order (p'(0+) + p'(0-) need not vanish).
    """
    p = GddParams.of(params)
    if p.shape_sum <= 1.0:
        raise DomainError("PV moment needs alpha1 + alpha2 > 1 (density finite at 0)")
    res = [_pv_tail(p, d) for d in deltas]
    vals = [r.value for r in res]
    qerr = max(r.abs_error_estimate for r in res)
    v0 = _poly_extrapolate(deltas, vals)
    v1 = _poly_extrapolate(deltas[1:], vals[1:])
    # the spread between extrapolation orders, doubled: the remainder is not a
    # polynomial in delta when the density is not analytic at 0
    return MomentReport(-1.0, v0, "pv_quadrature", 2.0 * abs(v0 - v1) + qerr)


def pv_inverse_moment_eps(params: GddParams, epsilons=PV_EPSILONS) -> MomentReport:
    """PV E(1/X) as lim_{eps->0} [E(X^{eps-1}; X>0) - cos(pi eps) E(|X|^{eps-1}; X<0)].

    This is Re of the analytic continuation of E(X^{eps-1}) with
    (-|x|)^{eps-1} = -e^{i pi eps} |x|^{eps-1}; both pieces come from the
    closed-form half-line moments, extrapolated polynomially in eps.
    """
    p = GddParams.of(params)
    if p.shape_sum <= 1.0:
        raise DomainError("PV moment needs alpha1 + alpha2 > 1 (density finite at 0)")
    q = p.swapped()
    vals = []
    for e in epsilons:
        a, _ = _half_moment_parts(p, e)
        c, _ = _half_moment_parts(q, e)
        vals.append(a - math.cos(math.pi * e) * c)
    v0 = _poly_extrapolate(epsilons, vals)
    v1 = _poly_extrapolate(epsilons[1:], vals[1:])
    return MomentReport(-1.0, v0, "closed_form_limit", abs(v0 - v1))
