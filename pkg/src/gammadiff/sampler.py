"""Seeded random variates for the gamma, gamma difference and variance gamma laws.

Uniforms come from a counter-based splitmix64 stream: draw i of a call uses
counters derived from (stream key, position + i), so results depend only on
(seed, position, parameters, n) and never on the backend or on batch size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DomainError
from .gdd import GddParams
from .vg import VgParams, to_gdd

# fixed sub-stream ids
STREAM_X1 = 1
STREAM_X2 = 2
STREAM_MIX = 3
STREAM_NORMAL = 4
STREAM_GAMMA = 5


@dataclass
class SamplerState:
    """Generator state: a 64-bit seed and a position counter.

    Every sampling call consumes ``n`` positions.  One state per thread.
    """

    seed: int = 0
    stream_position: int = 0

    def __post_init__(self):
        self.seed = int(self.seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_position = int(self.stream_position)
        if self.stream_position < 0:
            raise DomainError("stream_position must be >= 0")

    def take(self, n: int) -> int:
        start = self.stream_position
        self.stream_position += n
        return start


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


def _check_positive(name, v) -> float:
    v = float(v)
    if not (math.isfinite(v) and v > 0.0):
        raise DomainError(f"{name} must be finite and > 0, got {v!r}")
    return v


def _standard_gamma(state_seed: int, stream: int, start: int, n: int, shape: float) -> np.ndarray:
    key = _kernels.stream_key(state_seed, stream)
    out = _kernels.gamma_variates(key, np.uint64(start), n, float(shape))
    if np.isnan(out).any():
        raise ConvergenceError("gamma rejection sampler exhausted its attempt budget")
    return out


def sample_gamma(state: SamplerState, alpha: float, beta: float, n: int) -> np.ndarray:
    """n draws from Gamma(shape alpha, rate beta)."""
    alpha = _check_positive("alpha", alpha)
    beta = _check_positive("beta", beta)
    n = _check_n(n)
    start = state.take(n)
    return _standard_gamma(state.seed, STREAM_GAMMA, start, n, alpha) / beta


def sample_gdd(state: SamplerState, params: GddParams, n: int) -> np.ndarray:
    """n draws of X1 - X2 with X1, X2 from separate sub-streams."""
    p = GddParams.of(params)
    n = _check_n(n)
    start = state.take(n)
    x1 = _standard_gamma(state.seed, STREAM_X1, start, n, p.alpha1) / p.beta1
    x2 = _standard_gamma(state.seed, STREAM_X2, start, n, p.alpha2) / p.beta2
    return x1 - x2


def sample_vg(state: SamplerState, vg: VgParams, n: int, route: str = "mixture") -> np.ndarray:
    """n variance gamma draws.

    route "mixture": a ~ Gamma(r/2, rate 1/2), then N(theta a, sigma^2 a).
    route "difference": sample_gdd on the mapped gamma difference parameters.
    """
    v = VgParams.of(vg)
    n = _check_n(n)
    if route == "difference":
        return sample_gdd(state, to_gdd(v), n)
    if route != "mixture":
        raise DomainError(f"unknown vg sampling route {route!r}")
    start = state.take(n)
    a = 2.0 * _standard_gamma(state.seed, STREAM_MIX, start, n, 0.5 * v.r)
    z = _kernels.normal_variates(_kernels.stream_key(state.seed, STREAM_NORMAL), np.uint64(start), n)
    return v.theta * a + v.sigma * np.sqrt(a) * z


# ---------------------------------------------------------------------------
# validation helpers
# ---------------------------------------------------------------------------


def moment_z_scores(samples, exact_moments, k_max: int = 4):
    """z-scores (empirical - exact) / SE for raw moments 1..k_max.

    SE uses the exact moments: sqrt((m_{2k} - m_k^2) / n), so exact_moments
    must reach order 2 k_max.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    out = []
    pw = np.ones_like(x)
    for k in range(1, k_max + 1):
        pw = pw * x
        emp = float(np.mean(pw))
        var = exact_moments[2 * k] - exact_moments[k] ** 2
        se = math.sqrt(max(var, 0.0) / n)
        out.append((emp - exact_moments[k]) / se if se > 0 else 0.0)
    return out


def ks_one_sample(samples, cdf_sorted, alpha: float = 0.001):
    """(D, critical value) of the Kolmogorov-Smirnov test against a cdf.

    ``cdf_sorted`` maps a sorted array to cdf values.
    """
    from scipy.stats import kstwo

    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    f = np.asarray(cdf_sorted(x), dtype=float)
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - f)), float(np.max(f - (i - 1) / n)))
    return d, float(kstwo.ppf(1.0 - alpha, n))


def ks_two_sample(a, b):
    """(D, p-value) of the two-sample Kolmogorov-Smirnov test."""
    from scipy.stats import ks_2samp

    r = ks_2samp(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return float(r.statistic), float(r.pvalue)
