"""Variance gamma law VG(r, theta, sigma) as the alpha1 = alpha2 gamma difference.

Map: alpha1 = alpha2 = r/2, 1/beta1 = theta + sqrt(theta^2 + sigma^2),
1/beta2 = -theta + sqrt(theta^2 + sigma^2), so 1/(beta1 beta2) = sigma^2 and
1/beta1 - 1/beta2 = 2 theta.  theta > 0 puts the heavier tail on the right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from . import moments as gmoments
from .errors import DomainError, PoleError
from .gdd import GddParams
from .moments import MomentReport
from .specfun import EPS, SpecialValue, gauss_2f1, log_bessel_k, log_bessel_k_array
from .stein import (OdeResidual, TestFunction, expectation_against, fd_derivatives,
                    SteinResult, ode_coefficients)


@dataclass(frozen=True)
class VgParams:
    r: float
    theta: float
    sigma: float

    def __post_init__(self):
        for name in ("r", "theta", "sigma"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.r <= 0:
            raise DomainError(f"r must be > 0, got {self.r!r}")
        if self.sigma <= 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma!r}")

    @classmethod
    def of(cls, v) -> "VgParams":
        return v if isinstance(v, VgParams) else cls(*v)

    @property
    def mean(self) -> float:
        return self.r * self.theta


def to_gdd(vg: VgParams) -> GddParams:
    vg = VgParams.of(vg)
    root = math.hypot(vg.theta, vg.sigma)
    # the smaller root is formed as sigma^2 / (larger root) to avoid cancellation
    if vg.theta >= 0:
        inv1 = vg.theta + root
        inv2 = vg.sigma ** 2 / inv1
    else:
        inv2 = -vg.theta + root
        inv1 = vg.sigma ** 2 / inv2
    return GddParams(0.5 * vg.r, 1.0 / inv1, 0.5 * vg.r, 1.0 / inv2)


def from_gdd(params: GddParams) -> VgParams:
    p = GddParams.of(params)
    if p.alpha1 != p.alpha2:
        raise DomainError("only the alpha1 = alpha2 subfamily is variance gamma")
    return VgParams(2.0 * p.alpha1, 0.5 * (1.0 / p.beta1 - 1.0 / p.beta2),
                    1.0 / math.sqrt(p.beta1 * p.beta2))


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------


def vg_log_pdf_at_zero(vg: VgParams) -> float:
    vg = VgParams.of(vg)
    if vg.r <= 1.0:
        raise PoleError(f"variance gamma density is infinite at 0 for r <= 1 (r = {vg.r!r})")
    nu = 0.5 * (vg.r - 1.0)
    s2 = vg.sigma ** 2 + vg.theta ** 2
    # K_nu(z) ~ Gamma(nu)/2 (2/z)^nu as z -> 0
    return (math.lgamma(nu) - math.log(2.0) - 0.5 * math.log(math.pi * vg.sigma ** 2)
            - math.lgamma(0.5 * vg.r) + nu * math.log(vg.sigma ** 2 / s2))


def vg_log_pdf(vg: VgParams, x: float):
    """(ln p(x), relative error, converged) from the Bessel-K form."""
    vg = VgParams.of(vg)
    x = float(x)
    if x == 0.0:
        return vg_log_pdf_at_zero(vg), 8.0 * EPS, True
    s = math.hypot(vg.sigma, vg.theta)
    nu = 0.5 * (vg.r - 1.0)
    ax = abs(x)
    lk, rel, ok = log_bessel_k(nu, ax * s / vg.sigma ** 2)
    logp = (vg.theta * x / vg.sigma ** 2 - 0.5 * math.log(math.pi * vg.sigma ** 2)
            - math.lgamma(0.5 * vg.r) + nu * math.log(ax / (2.0 * s)) + lk)
    return logp, rel + 8.0 * EPS * (1.0 + abs(logp)), ok


def vg_pdf(vg: VgParams, x: float) -> SpecialValue:
    lp, rel, ok = vg_log_pdf(vg, x)
    v = math.exp(lp)
    return SpecialValue(v, v * rel, ok)


def vg_pdf_array(vg: VgParams, x) -> np.ndarray:
    """Vectorized Bessel-form density (inf at 0 when r <= 1)."""
    vg = VgParams.of(vg)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    nz = x != 0
    if nz.any():
        s = math.hypot(vg.sigma, vg.theta)
        nu = 0.5 * (vg.r - 1.0)
        ax = np.abs(x[nz])
        lk = log_bessel_k_array(nu, ax * s / vg.sigma ** 2)
        out[nz] = np.exp(vg.theta * x[nz] / vg.sigma ** 2 - 0.5 * math.log(math.pi * vg.sigma ** 2)
                         - math.lgamma(0.5 * vg.r) + nu * np.log(ax / (2.0 * s)) + lk)
    if (~nz).any():
        out[~nz] = math.exp(vg_log_pdf_at_zero(vg)) if vg.r > 1.0 else math.inf
    return out


def vg_char_fn(vg: VgParams, t):
    """(1 - 2 i theta t + sigma^2 t^2)^(-r/2), principal branch."""
    vg = VgParams.of(vg)
    t = np.asarray(t, dtype=float)
    z = 1.0 - 2j * vg.theta * t + vg.sigma ** 2 * t * t
    out = np.exp(-0.5 * vg.r * np.log(z))
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# ODE
# ---------------------------------------------------------------------------


def vg_ode_coefficients(vg: VgParams, x):
    """(A, B, C) of L = x d2 - (2 theta x/s2 + (r-2)) d - (x/s2 - (r-2) theta/s2)."""
    vg = VgParams.of(vg)
    x = np.asarray(x, dtype=float)
    s2 = vg.sigma ** 2
    return x, -(2.0 * vg.theta * x / s2 + (vg.r - 2.0)), -(x / s2 - (vg.r - 2.0) * vg.theta / s2)


def vg_ode_check(vg: VgParams, x: float) -> OdeResidual:
    vg = VgParams.of(vg)
    x = float(x)
    if x == 0.0 or not math.isfinite(x):
        raise DomainError("ODE residual is evaluated at finite x != 0 only")
    f0, f1, f2 = fd_derivatives(lambda t: vg_pdf_array(vg, t), x)
    a, b, c = (float(v) for v in vg_ode_coefficients(vg, x))
    terms = (a * f2, b * f1, c * f0)
    return OdeResidual(x, math.fsum(terms), sum(abs(t) for t in terms))


def vg_ode_residual(vg: VgParams, x: float) -> float:
    return vg_ode_check(vg, x).residual


def operator_ratio(vg: VgParams, x: float):
    """(ratio, defect) relating the VG operator to the gamma difference one at x.

    The coefficient triples (A, B, C) of both operators under to_gdd are
    compared: ratio is the least-squares constant c with VG = c * GDD and
    defect the relative size of what is left over.
    """
    vg = VgParams.of(vg)
    v1 = np.array([float(c) for c in vg_ode_coefficients(vg, x)])
    v2 = np.array([float(c) for c in ode_coefficients(to_gdd(vg), x)])
    ratio = float(v1 @ v2 / (v2 @ v2))
    defect = float(np.linalg.norm(v1 - ratio * v2) / np.linalg.norm(v1))
    return ratio, defect


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


def vg_moments_recurrence(vg: VgParams, k_max: int) -> List[MomentReport]:
    """m_{k+1} = theta (2k + r) m_k + sigma^2 k (r + k - 1) m_{k-1}, m_0 = 1."""
    vg = VgParams.of(vg)
    if int(k_max) != k_max or k_max < 0:
        raise DomainError("k_max must be a non-negative integer")
    m = [1.0]
    prev = 0.0
    for k in range(int(k_max)):
        nxt = vg.theta * (2 * k + vg.r) * m[k] + vg.sigma ** 2 * k * (vg.r + k - 1) * prev
        prev = m[k]
        m.append(nxt)
    return [MomentReport(k, v, "recurrence") for k, v in enumerate(m)]


def vg_moment_closed_form(vg: VgParams, k: int) -> MomentReport:
    """Closed form with l = ceil(k/2) + 1/2, m = k mod 2, prefactor in log space."""
    vg = VgParams.of(vg)
    k = int(k)
    if k < 0:
        raise DomainError("moment order must be non-negative")
    if k == 0:
        return MomentReport(0, 1.0, "closed_form")
    m = k % 2
    if m == 1 and vg.theta == 0.0:
        return MomentReport(k, 0.0, "closed_form")
    ell = math.ceil(k / 2) + 0.5
    r = vg.r
    s2 = vg.theta ** 2 + vg.sigma ** 2
    z = vg.theta ** 2 / s2
    f = gauss_2f1(ell, 0.5 * (r - 1.0) + ell, 0.5 + m, z)
    logv = ((k + m) * math.log(2.0) + (r + 2 * k) * math.log(vg.sigma) - 0.5 * math.log(math.pi)
            - 0.5 * (r + k + m) * math.log(s2) - math.lgamma(0.5 * r)
            + math.lgamma(0.5 * (r - 1.0) + ell) + math.lgamma(ell))
    if m == 1:
        logv += math.log(abs(vg.theta))
    sign = -1.0 if (m == 1 and vg.theta < 0) else 1.0
    v = sign * math.exp(logv)
    return MomentReport(k, v * f.value, "closed_form", abs(v) * f.abs_error_estimate)


def vg_moments(vg: VgParams, k_max: int, route: str = "recurrence") -> List[MomentReport]:
    if route == "recurrence":
        return vg_moments_recurrence(vg, k_max)
    if route == "closed_form":
        return [vg_moment_closed_form(vg, k) for k in range(int(k_max) + 1)]
    if route == "gdd":
        return gmoments.moments_recurrence(to_gdd(vg), k_max)
    raise DomainError(f"unknown VG moment route {route!r}")


def vg_abs_moment(vg: VgParams, k: float) -> MomentReport:
    """E|Y|^k for real k > max(-1, -r)."""
    vg = VgParams.of(vg)
    k = float(k)
    if not (math.isfinite(k) and k > max(-1.0, -vg.r)):
        raise DomainError(f"absolute VG moment needs k > max(-1, -r), got {k!r}")
    r = vg.r
    s2 = vg.theta ** 2 + vg.sigma ** 2
    z = vg.theta ** 2 / s2
    f = gauss_2f1(0.5 * (k + 1.0), 0.5 * (r + k), 0.5, z)
    logv = (k * math.log(2.0) + (r + 2 * k) * math.log(vg.sigma) - 0.5 * math.log(math.pi)
            - 0.5 * (r + k) * math.log(s2) - math.lgamma(0.5 * r)
            + math.lgamma(0.5 * (r + k)) + math.lgamma(0.5 * (k + 1.0)))
    v = math.exp(logv)
    return MomentReport(k, v * f.value, "closed_form", v * f.abs_error_estimate + 8.0 * EPS * v * f.value)


# ---------------------------------------------------------------------------
# Stein identity
# ---------------------------------------------------------------------------


def vg_stein_terms(vg: VgParams, tf: TestFunction, x):
    vg = VgParams.of(vg)
    x = np.asarray(x, dtype=float)
    s2 = vg.sigma ** 2
    return (s2 * x * tf.g2(x), (s2 * vg.r + 2.0 * vg.theta * x) * tf.g1(x),
            (vg.r * vg.theta - x) * tf.g(x))


def vg_stein_check(vg: VgParams, tf: TestFunction) -> SteinResult:
    vg = VgParams.of(vg)
    from .stein import check_admissible

    check_admissible(to_gdd(vg), tf)
    val, err, scale, ok = expectation_against(
        lambda x: vg_pdf_array(vg, x), lambda x: np.stack(vg_stein_terms(vg, tf, x)), vg.mean)
    return SteinResult(val, err, scale, ok)


def vg_stein_expectation(vg: VgParams, tf: TestFunction) -> SpecialValue:
    return vg_stein_check(vg, tf).as_special()
