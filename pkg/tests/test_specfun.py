from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydcavity.errors import DomainError
from rydcavity.specfun import (
    FRESNEL_LIMIT,
    QuadratureConfig,
    cos_integral,
    cos_integral_mod,
    f_tau,
    fresnel,
    sici,
    sin_integral,
    sin_integral_mod,
)

mp.mp.dps = 30


def mp_fresnel(x):
    # mpmath normalizes with pi/2 t^2; rescale to the sin(t^2) convention
    k = mp.sqrt(2 / mp.pi)
    return float(mp.fresnels(x * k) / k), float(mp.fresnelc(x * k) / k)


def mp_sim(beta, x):
    return float(mp.quad(lambda t: mp.sin(t) / (t * mp.sqrt(1 + beta * t)),
                         [0] + [k * mp.pi for k in range(1, int(x / mp.pi) + 1)] + [x]))


def mp_cim(beta, x):
    f = lambda t: mp.cos(t) / (t * mp.sqrt(1 + beta * t))  # noqa: E731
    k0 = int(mp.floor(x / mp.pi - 0.5)) + 1
    first = mp.quad(f, [x, (k0 + 0.5) * mp.pi])
    tail = mp.quadosc(f, [(k0 + 0.5) * mp.pi, mp.inf], omega=1)
    return float(-(first + tail))


@pytest.mark.parametrize("x", [0.0, 1e-3, 0.5, 1.0, 1.9, 2.0, 2.1, 3.7, 10.0, 55.5, 1e3])
def test_fresnel_matches_mpmath(x):
    s, c = fresnel(x)
    rs, rc = mp_fresnel(x)
    assert s == pytest.approx(rs, abs=1e-14, rel=1e-13)
    assert c == pytest.approx(rc, abs=1e-14, rel=1e-13)


@given(st.floats(min_value=-50, max_value=50))
def test_fresnel_is_odd(x):
    s, c = fresnel(x)
    sm, cm = fresnel(-x)
    assert (s, c) == (-sm, -cm)


def test_fresnel_limits():
    # the approach is like 1/(2x), so 1e-6 needs x of order 1e6
    for x in (1e6, 1e7, math.inf):
        s, c = fresnel(x)
        assert abs(s - FRESNEL_LIMIT) < 1e-6 and abs(c - FRESNEL_LIMIT) < 1e-6


@pytest.mark.parametrize("x", [1e-8, 0.1, 1.0, 3.99, 4.0, 4.01, 7.5, 30.0, 1e3, 1e6])
def test_sici_matches_mpmath(x):
    si, ci = sici(x)
    assert si == pytest.approx(float(mp.si(x)), rel=1e-14, abs=1e-15)
    assert ci == pytest.approx(float(mp.ci(x)), rel=1e-13, abs=1e-15)


def test_sici_limits_and_domain():
    assert abs(sin_integral(1e6) - math.pi / 2) < 1e-6
    assert sin_integral(0.0) == 0.0
    assert sin_integral(-2.0) == -sin_integral(2.0)
    assert sici(math.inf) == (math.pi / 2, 0.0)
    with pytest.raises(DomainError):
        cos_integral(0.0)
    with pytest.raises(DomainError):
        cos_integral(-1.0)


@pytest.mark.parametrize("x", [0.3, 2.0, 9.0, 40.0, 500.0])
def test_modified_integrals_reduce_at_beta_zero(x):
    assert abs(sin_integral_mod(0.0, x) - sin_integral(x)) < 1e-8
    assert abs(cos_integral_mod(0.0, x) - cos_integral(x)) < 1e-8


@pytest.mark.parametrize("beta,x", [(0.1, 0.5), (0.1, 20.0), (2.0, 3.0), (2.0, 100.0), (50.0, 7.0), (1e-3, 40.0)])
def test_sim_matches_mpmath(beta, x):
    assert sin_integral_mod(beta, x) == pytest.approx(mp_sim(beta, x), abs=1e-10, rel=1e-9)


@pytest.mark.parametrize("beta,x", [(0.1, 0.05), (0.1, 2.0), (2.0, 30.0), (50.0, 1.0), (1e-3, 13.0)])
def test_cim_matches_mpmath(beta, x):
    assert cos_integral_mod(beta, x) == pytest.approx(mp_cim(beta, x), abs=1e-10, rel=1e-9)


def test_sim_infinite_upper_limit():
    beta = 0.7
    ref = float(mp.quadosc(lambda t: mp.sin(t) / (t * mp.sqrt(1 + beta * t)), [0, mp.inf], omega=1))
    assert sin_integral_mod(beta, math.inf) == pytest.approx(ref, abs=1e-10)
    assert cos_integral_mod(beta, math.inf) == 0.0


def test_f_tau_zero_and_monotone():
    eta = 1.6
    assert f_tau(eta, 0.0) == 0.0
    grid = np.linspace(0.01, 60.0, 50)
    vals = [f_tau(eta, t) for t in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert 0 < vals[-1] < math.pi / 2


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=1e-3, max_value=30.0), st.floats(min_value=0.05, max_value=200.0))
def test_sim_bounded_by_first_lobe(beta, x):
    # the damping factor decreases from 1, so SiM(beta, x) = Si(xi) for some xi in [0, x]
    v = sin_integral_mod(beta, x)
    assert 0.0 < v <= sin_integral(math.pi) + 1e-12


def test_refined_config_agrees():
    cfg = QuadratureConfig().refined()
    assert sin_integral_mod(0.3, 77.0, cfg) == pytest.approx(sin_integral_mod(0.3, 77.0), abs=1e-11)


def test_domain_errors():
    with pytest.raises(DomainError):
        sin_integral_mod(-1.0, 1.0)
    with pytest.raises(DomainError):
        sin_integral_mod(1.0, -1.0)
    with pytest.raises(DomainError):
        cos_integral_mod(1.0, 0.0)
    with pytest.raises(DomainError):
        f_tau(0.0, 1.0)
