import math

import numpy as np
import pytest

from gammadiff import gdd, moments, stein
from gammadiff.errors import DomainError
from gammadiff.gdd import GddParams

from conftest import GRID, GRID_IDS

GENERIC = GddParams(2, 1.5, 0.7, 2.2)
SMOOTH = [g for g in GRID if g[0] + g[2] > 1]
ODE_X = [s * v for v in np.geomspace(0.1, 5.0, 4) for s in (1.0, -1.0)]


# ---------------------------------------------------------------------------
# density ODE
# ---------------------------------------------------------------------------


def test_ode_laplace_is_exact():
    r = stein.ode_check((1, 1, 1, 1), 1.0)
    assert r.scaled <= 1e-9


@pytest.mark.parametrize("x", [0.5, -0.5, 2.0, -2.0])
def test_ode_generic_points(x):
    assert stein.ode_check(GENERIC, x).scaled <= 1e-6


@pytest.mark.parametrize("params", SMOOTH, ids=[i for g, i in zip(GRID, GRID_IDS) if g[0] + g[2] > 1])
def test_ode_grid(params):
    assert max(stein.ode_check(params, x).scaled for x in ODE_X) <= 1e-6


def test_ode_reflection():
    sw = GddParams(0.7, 2.2, 2, 1.5)
    for x in (0.5, 2.0):
        a = stein.ode_check(GENERIC, x)
        b = stein.ode_check(sw, -x)
        assert a.scaled <= 1e-6 and b.scaled <= 1e-6
        assert math.isclose(a.scale, b.scale, rel_tol=1e-6)


def test_ode_rejects_zero():
    with pytest.raises(DomainError):
        stein.ode_check(GENERIC, 0.0)


@pytest.mark.parametrize("x", [0.1, 0.3, 1.0, 4.0, -0.1, -2.5])
def test_fd_derivative_laplace(x):
    f = lambda t: 0.5 * np.exp(-np.abs(t))
    f0, f1, f2 = stein.fd_derivatives(f, x)
    exact = -math.copysign(1.0, x) * 0.5 * math.exp(-abs(x))
    assert abs(f1 - exact) <= 1e-8 * abs(exact)
    assert abs(f2 - 0.5 * math.exp(-abs(x))) <= 1e-6 * f0


# ---------------------------------------------------------------------------
# Stein identity
# ---------------------------------------------------------------------------


def test_stein_one_reduces_to_mean(gparams):
    # g = 1 leaves (a1 b2 - a2 b1) - b1 b2 m1, zero by the mean formula
    p = gparams
    m1 = p.alpha1 / p.beta1 - p.alpha2 / p.beta2
    assert abs(p.alpha1 * p.beta2 - p.alpha2 * p.beta1 - p.beta1 * p.beta2 * m1) <= 1e-14
    r = stein.stein_check(p, stein.BATTERY["one"])
    assert abs(r.value) <= 1e-7 * r.scale


def test_stein_x_matches_k1_recurrence(gparams):
    p = gparams
    r = stein.stein_check(p, stein.BATTERY["x"])
    m = moments.moments_recurrence(p, 2)
    direct = (p.alpha1 + p.alpha2) + (p.beta2 - p.beta1) * m[1].value \
        + (p.alpha1 * p.beta2 - p.alpha2 * p.beta1) * m[1].value - p.beta1 * p.beta2 * m[2].value
    assert abs(direct) <= 1e-12 * p.beta1 * p.beta2 * m[2].value
    assert abs(r.value) <= 1e-7 * r.scale


def test_stein_sin_generic():
    r = stein.stein_check(GENERIC, stein.BATTERY["sin"])
    assert r.converged
    assert abs(r.value) <= 1e-7


@pytest.mark.parametrize("gname", list(stein.BATTERY))
def test_stein_battery(gparams, gname):
    r = stein.stein_check(gparams, stein.BATTERY[gname])
    assert r.converged
    assert abs(r.value) <= 1e-7 * r.scale


def test_stein_expectation_special_value():
    v = stein.stein_expectation(GENERIC, stein.BATTERY["cos"])
    assert v.converged and abs(v.value) <= 1e-7


@pytest.mark.parametrize("params", GRID, ids=GRID_IDS)
def test_stein_recurrence_equivalence(params):
    # g = x^k gives k(k-1) m_{k-1} + k(a1+a2) m_{k-1} + k(b2-b1) m_k + (a1 b2 - a2 b1) m_k - b1 b2 m_{k+1} = 0
    p = GddParams(*params)
    q = [moments.moment_quadrature(p, k).value for k in range(8)]
    for k in range(1, 7):
        lhs = p.beta1 * p.beta2 * q[k + 1]
        rhs = k * (k - 1 + p.alpha1 + p.alpha2) * q[k - 1] \
            + (k * (p.beta2 - p.beta1) + p.alpha1 * p.beta2 - p.alpha2 * p.beta1) * q[k]
        scale = moments.moment_abs_scale(p, k + 1) * p.beta1 * p.beta2
        assert abs(lhs - rhs) <= 1e-6 * max(abs(lhs), scale)


def test_power_function_derivatives():
    tf = stein.power_function(3)
    x = np.array([0.5, -2.0])
    assert np.allclose(tf.g(x), x ** 3)
    assert np.allclose(tf.g1(x), 3 * x ** 2)
    assert np.allclose(tf.g2(x), 6 * x)
    r = stein.stein_check(GENERIC, stein.power_function(5))
    assert abs(r.value) <= 1e-7 * r.scale


def test_admissibility_screen():
    ok = stein.TestFunction(lambda x: np.exp(0.3 * x), lambda x: 0.3 * np.exp(0.3 * x),
                            lambda x: 0.09 * np.exp(0.3 * x), ("sub_exponential", 0.3), "exp")
    r = stein.stein_check(GENERIC, ok)
    assert abs(r.value) <= 1e-7 * r.scale
    bad = stein.TestFunction(ok.g, ok.g1, ok.g2, ("sub_exponential", 1.5), "exp")
    with pytest.raises(DomainError):
        stein.stein_check(GENERIC, bad)
    with pytest.raises(DomainError):
        stein.stein_check(GENERIC, stein.TestFunction(ok.g, ok.g1, ok.g2, ("weird",), "w"))


# ---------------------------------------------------------------------------
# characteristic-function ODE
# ---------------------------------------------------------------------------


def test_charfn_ode_at_zero(gparams):
    assert stein.charfn_ode_check(gparams, 0.0) <= 1e-9


def test_charfn_ode_laplace():
    assert stein.charfn_ode_check((1, 1, 1, 1), 1.0) <= 1e-10
    phi = gdd.char_fn((1, 1, 1, 1), 1.0)
    assert abs(phi - 0.5) <= 1e-15


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_charfn_ode_symmetric(gparams, t):
    a = stein.charfn_ode_check(gparams, t)
    b = stein.charfn_ode_check(gparams, -t)
    assert a <= 1e-8 and b <= 1e-8
    assert abs(a - b) <= 1e-12
