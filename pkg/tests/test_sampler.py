import math

import numpy as np
import pytest

from gammadiff import gdd, moments, sampler, vg
from gammadiff.errors import DomainError
from gammadiff.sampler import SamplerState

from conftest import GRID, GRID_IDS

N = 200_000


def _gamma_moments(alpha, beta, k_max):
    out = [1.0]
    for k in range(1, k_max + 1):
        out.append(out[-1] * (alpha + k - 1) / beta)
    return out


def test_determinism():
    a = sampler.sample_gdd(SamplerState(42), (2, 1.5, 0.7, 2.2), 1000)
    b = sampler.sample_gdd(SamplerState(42), (2, 1.5, 0.7, 2.2), 1000)
    assert a.tobytes() == b.tobytes()
    c = sampler.sample_gdd(SamplerState(43), (2, 1.5, 0.7, 2.2), 1000)
    assert not np.array_equal(a, c)


def test_position_advances_and_chunking_is_invariant():
    s = SamplerState(7)
    first = sampler.sample_vg(s, (3, 0.5, 2), 300)
    second = sampler.sample_vg(s, (3, 0.5, 2), 700)
    assert s.stream_position == 1000
    whole = sampler.sample_vg(SamplerState(7), (3, 0.5, 2), 1000)
    assert np.array_equal(np.concatenate([first, second]), whole)
    resumed = sampler.sample_vg(SamplerState(7, 300), (3, 0.5, 2), 700)
    assert np.array_equal(resumed, second)


def test_gamma_positive_and_exponential_mean():
    x = sampler.sample_gamma(SamplerState(1), 1.0, 2.0, N)
    assert np.all(x > 0)
    se = 0.5 / math.sqrt(N)
    assert abs(x.mean() - 0.5) <= 5 * se


@pytest.mark.parametrize("alpha,beta", [(0.3, 1.0), (0.6, 0.7), (1.0, 1.0), (2.5, 3.0), (40.0, 0.5)])
def test_gamma_moments(alpha, beta):
    x = sampler.sample_gamma(SamplerState(11), alpha, beta, N)
    assert np.all(x > 0)
    z = sampler.moment_z_scores(x, _gamma_moments(alpha, beta, 8), 4)
    assert max(abs(v) for v in z) <= 5.0
    # sample variance; central fourth moment of the gamma law is (3 a^2 + 6 a) / b^4
    var_se = math.sqrt((2 * alpha ** 2 + 6 * alpha) / beta ** 4 / N)
    assert abs(x.var() - alpha / beta ** 2) <= 5 * var_se


@pytest.mark.parametrize("params", GRID, ids=GRID_IDS)
def test_gdd_moments(params):
    x = sampler.sample_gdd(SamplerState(2024), params, N)
    m = [r.value for r in moments.moments_recurrence(params, 8)]
    z = sampler.moment_z_scores(x, m, 4)
    assert max(abs(v) for v in z) <= 5.0


@pytest.mark.parametrize("params", GRID, ids=GRID_IDS)
def test_gdd_ks(params):
    x = sampler.sample_gdd(SamplerState(99), params, 100_000)
    d, crit = sampler.ks_one_sample(x, lambda xs: gdd.cdf_sorted(params, xs))
    assert d <= crit


@pytest.mark.parametrize("v", [(3, 0.5, 2), (1.5, -1, 0.5), (5, 0, 1)])
def test_vg_moments_both_routes(v):
    m = [r.value for r in vg.vg_moments(v, 8)]
    for route in ("mixture", "difference"):
        y = sampler.sample_vg(SamplerState(5), v, N, route)
        z = sampler.moment_z_scores(y, m, 4)
        assert max(abs(t) for t in z) <= 5.0


def test_vg_symmetric_skewness():
    v = (3, 0, 1)
    y = sampler.sample_vg(SamplerState(8), v, N)
    m = [r.value for r in vg.vg_moments(v, 6)]
    # skewness estimate; SE from the exact sixth moment of the standardized law
    s = m[2] ** 0.5
    skew = np.mean(y ** 3) / s ** 3
    se = math.sqrt(m[6] / s ** 6 / N)
    assert abs(skew) <= 5 * se


@pytest.mark.parametrize("v", [(3, 0.5, 2), (1.5, -1, 0.5)])
def test_vg_two_routes_ks(v):
    a = sampler.sample_vg(SamplerState(31), v, 100_000, "mixture")
    b = sampler.sample_vg(SamplerState(32), v, 100_000, "difference")
    d, pval = sampler.ks_two_sample(a, b)
    assert pval > 0.001


def test_domain_errors():
    s = SamplerState(0)
    with pytest.raises(DomainError):
        sampler.sample_gamma(s, 0.0, 1.0, 10)
    with pytest.raises(DomainError):
        sampler.sample_gamma(s, 1.0, -1.0, 10)
    with pytest.raises(DomainError):
        sampler.sample_gamma(s, 1.0, 1.0, 0)
    with pytest.raises(DomainError):
        sampler.sample_gamma(s, math.nan, 1.0, 5)
    with pytest.raises(DomainError):
        sampler.sample_vg(s, (2, 0, 1), 5, "bogus")
    with pytest.raises(DomainError):
        SamplerState(0, -1)
    assert s.stream_position == 0


def test_seed_wraps_to_64_bits():
    a = sampler.sample_gamma(SamplerState(2 ** 64 + 3), 2.0, 1.0, 50)
    b = sampler.sample_gamma(SamplerState(3), 2.0, 1.0, 50)
    assert np.array_equal(a, b)


def test_streams_are_independent():
    # X1 and X2 use different sub-streams even with equal parameters
    s = SamplerState(3)
    x = sampler.sample_gdd(s, (2, 1, 2, 1), 50_000)
    g1 = sampler.sample_gamma(SamplerState(3), 2, 1, 50_000)
    assert not np.array_equal(x, np.zeros_like(x))
    assert abs(np.corrcoef(x[:-1], x[1:])[0, 1]) <= 5 / math.sqrt(50_000)
    assert not np.array_equal(g1[:10], x[:10])
