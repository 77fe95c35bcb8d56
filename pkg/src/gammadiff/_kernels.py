"""Hot inner loops.

Every kernel exists twice: a scalar-loop form that numba compiles, and a
vectorized numpy form.  The module-level names (``hyp_series``,
``laguerre_sum``, ``gamma_variates`` ...) are bound to the numba form when
:data:`gammadiff._accel.USE_NUMBA` is true and to the numpy form otherwise.
Both forms consume the same counter-based random stream, so for a given seed
they agree up to libm rounding.
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit

EPS = 2.220446049250313e-16
SERIES_TOL = 1e-16
MAX_TERMS = 10_000

# ---------------------------------------------------------------------------
# hypergeometric power series  1F1 (two_numer=False) and 2F1 (two_numer=True)
# The denominator parameter is passed as c + cfrac so that (c + n) + cfrac is
# exact when c is an integer and cfrac a small offset from a pole.
# ---------------------------------------------------------------------------


@njit
def _hyp_series_scalar(a, b, c, cfrac, z, two_numer):
    s = 1.0
    term = 1.0
    abs_sum = 1.0
    guard = max(abs(a), abs(c))
    if two_numer:
        guard = max(guard, abs(b))
    else:
        guard = max(guard, abs(z))
    n = 0
    while n < MAX_TERMS:
        num = a + n
        if two_numer:
            num *= b + n
        if num == 0.0:
            return s, 2.0 * EPS * abs_sum, True
        term *= num / (((c + n) + cfrac) * (n + 1.0)) * z
        s += term
        abs_sum += abs(term)
        n += 1
        if n > guard:
            rb = abs((a + n) / (((c + n) + cfrac) * (n + 1.0)) * z)
            if two_numer:
                rb = max(rb * abs(b + n), abs(z))
            if rb < 1.0:
                tail = abs(term) * rb / (1.0 - rb)
                if tail <= SERIES_TOL * abs(s) or tail <= 1e-3 * EPS * abs_sum:
                    return s, tail + 2.0 * EPS * abs_sum, True
    return s, abs(term) + 2.0 * EPS * abs_sum, False


@njit
def _hyp_series_loop(a, b, c, cfrac, z, two_numer):
    m = z.shape[0]
    out = np.empty(m)
    err = np.empty(m)
    ok = np.empty(m, dtype=np.bool_)
    for i in range(m):
        out[i], err[i], ok[i] = _hyp_series_scalar(a, b, c, cfrac, z[i], two_numer)
    return out, err, ok


def _hyp_series_numpy(a, b, c, cfrac, z, two_numer):
    z = np.asarray(z, dtype=float)
    s = np.ones_like(z)
    term = np.ones_like(z)
    abs_sum = np.ones_like(z)
    err = np.zeros_like(z)
    ok = np.zeros(z.shape, dtype=bool)
    active = np.ones(z.shape, dtype=bool)
    guard = max(abs(a), abs(c), abs(b) if two_numer else 0.0)
    guard_z = np.abs(z) if not two_numer else np.zeros_like(z)
    absz = np.abs(z)
    for n in range(MAX_TERMS):
        num = a + n
        if two_numer:
            num *= b + n
        if num == 0.0:
            err[active] = 2.0 * EPS * abs_sum[active]
            ok[active] = True
            active[:] = False
            break
        ratio = num / (((c + n) + cfrac) * (n + 1.0))
        term = np.where(active, term * ratio * z, term)
        s = np.where(active, s + term, s)
        abs_sum = np.where(active, abs_sum + np.abs(term), abs_sum)
        k = n + 1
        rb = np.abs((a + k) / (((c + k) + cfrac) * (k + 1.0)) * z)
        if two_numer:
            rb = np.maximum(rb * abs(b + k), absz)
        check = active & (k > np.maximum(guard, guard_z)) & (rb < 1.0)
        if check.any():
            with np.errstate(divide="ignore", invalid="ignore"):
                tail = np.abs(term) * rb / (1.0 - rb)
            done = check & ((tail <= SERIES_TOL * np.abs(s)) | (tail <= 1e-3 * EPS * abs_sum))
            err[done] = tail[done] + 2.0 * EPS * abs_sum[done]
            ok[done] = True
            active &= ~done
        if not active.any():
            break
    err[active] = np.abs(term[active]) + 2.0 * EPS * abs_sum[active]
    return s, err, ok


# ---------------------------------------------------------------------------
# Gauss-Laguerre sums  sum_j w_j (1 + s_j / z)^power
# ---------------------------------------------------------------------------


@njit
def _laguerre_sum_loop(nodes, weights, z, power):
    m = z.shape[0]
    out = np.empty(m)
    for i in range(m):
        acc = 0.0
        for j in range(nodes.shape[0]):
            acc += weights[j] * math.exp(power * math.log1p(nodes[j] / z[i]))
        out[i] = acc
    return out


def _laguerre_sum_numpy(nodes, weights, z, power):
    z = np.asarray(z, dtype=float)
    return np.exp(power * np.log1p(nodes[None, :] / z[:, None])) @ weights


# ---------------------------------------------------------------------------
# counter-based random stream (splitmix64 finalizer, Steele/Lea/Vigna constants)
# ---------------------------------------------------------------------------

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
SLOTS = 256  # counters reserved per output index
MAX_ATTEMPTS = 63  # rejection attempts per output index (4 counters each)
BOOST_SLOT = 255
TWO_PI = 2.0 * math.pi
INV_2_53 = 1.0 / 9007199254740992.0


@njit
def _mix64(x):
    x = (x ^ (x >> np.uint64(30))) * MIX1
    x = (x ^ (x >> np.uint64(27))) * MIX2
    return x ^ (x >> np.uint64(31))


@njit
def _uniform_scalar(key, ctr):
    x = _mix64(key + (ctr + np.uint64(1)) * GOLDEN)
    return (float(x >> np.uint64(11)) + 0.5) * INV_2_53


def _uniform_numpy(key, ctr):
    with np.errstate(over="ignore"):
        x = np.uint64(key) + (ctr + np.uint64(1)) * GOLDEN
        x = (x ^ (x >> np.uint64(30))) * MIX1
        x = (x ^ (x >> np.uint64(27))) * MIX2
        x = x ^ (x >> np.uint64(31))
    return ((x >> np.uint64(11)).astype(np.float64) + 0.5) * INV_2_53


def stream_key(seed: int, stream: int) -> np.uint64:
    """64-bit key of sub-stream ``stream`` under ``seed``."""
    with np.errstate(over="ignore"):
        s = np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
        k = _mix64_numpy(_mix64_numpy(s) ^ np.uint64(stream & 0xFFFFFFFFFFFFFFFF))
        # a second round decorrelates adjacent stream ids
        k = _mix64_numpy(k + GOLDEN)
    return np.uint64(k[0])


def _mix64_numpy(x):
    with np.errstate(over="ignore"):
        x = (x ^ (x >> np.uint64(30))) * MIX1
        x = (x ^ (x >> np.uint64(27))) * MIX2
        return x ^ (x >> np.uint64(31))


@njit
def _standard_gamma_one(key, base, shape):
    """Marsaglia-Tsang squeeze/rejection; ``shape`` must be >= 1."""
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    for k in range(MAX_ATTEMPTS):
        ctr = base + np.uint64(4 * k)
        u1 = _uniform_scalar(key, ctr)
        u2 = _uniform_scalar(key, ctr + np.uint64(1))
        u3 = _uniform_scalar(key, ctr + np.uint64(2))
        x = math.sqrt(-2.0 * math.log(u1)) * math.cos(TWO_PI * u2)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        x2 = x * x
        if u3 < 1.0 - 0.0331 * x2 * x2:
            return d * v
        if math.log(u3) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
            return d * v
    return np.nan


@njit
def _gamma_variates_loop(key, start, n, shape):
    out = np.empty(n)
    boost = shape < 1.0
    s = shape + 1.0 if boost else shape
    for i in range(n):
        base = (np.uint64(start) + np.uint64(i)) * np.uint64(SLOTS)
        g = _standard_gamma_one(key, base, s)
        if boost:
            u = _uniform_scalar(key, base + np.uint64(BOOST_SLOT))
            g *= math.exp(math.log(u) / shape)
        out[i] = g
    return out


def _gamma_variates_numpy(key, start, n, shape):
    out = np.full(n, np.nan)
    boost = shape < 1.0
    s = shape + 1.0 if boost else shape
    d = s - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    base_all = (np.uint64(start) + np.arange(n, dtype=np.uint64)) * np.uint64(SLOTS)
    pending = np.arange(n)
    for k in range(MAX_ATTEMPTS):
        if pending.size == 0:
            break
        ctr = base_all[pending] + np.uint64(4 * k)
        u1 = _uniform_numpy(key, ctr)
        u2 = _uniform_numpy(key, ctr + np.uint64(1))
        u3 = _uniform_numpy(key, ctr + np.uint64(2))
        x = np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)
        v = 1.0 + c * x
        pos = v > 0.0
        v = np.where(pos, v, 1.0) ** 3
        x2 = x * x
        squeeze = u3 < 1.0 - 0.0331 * x2 * x2
        full = np.log(u3) < 0.5 * x2 + d * (1.0 - v + np.log(v))
        acc = pos & (squeeze | full)
        out[pending[acc]] = d * v[acc]
        pending = pending[~acc]
    if boost:
        u = _uniform_numpy(key, base_all + np.uint64(BOOST_SLOT))
        out *= np.exp(np.log(u) / shape)
    return out


@njit
def _normal_variates_loop(key, start, n):
    out = np.empty(n)
    for i in range(n):
        base = (np.uint64(start) + np.uint64(i)) * np.uint64(SLOTS)
        u1 = _uniform_scalar(key, base)
        u2 = _uniform_scalar(key, base + np.uint64(1))
        out[i] = math.sqrt(-2.0 * math.log(u1)) * math.cos(TWO_PI * u2)
    return out


def _normal_variates_numpy(key, start, n):
    base = (np.uint64(start) + np.arange(n, dtype=np.uint64)) * np.uint64(SLOTS)
    u1 = _uniform_numpy(key, base)
    u2 = _uniform_numpy(key, base + np.uint64(1))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)


if USE_NUMBA:
    hyp_series = _hyp_series_loop
    laguerre_sum = _laguerre_sum_loop
    gamma_variates = _gamma_variates_loop
    normal_variates = _normal_variates_loop
else:
    hyp_series = _hyp_series_numpy
    laguerre_sum = _laguerre_sum_numpy
    gamma_variates = _gamma_variates_numpy
    normal_variates = _normal_variates_numpy
