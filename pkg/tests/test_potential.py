from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydcavity.errors import DomainError, PreconditionError
from rydcavity.pairham import perturbation_closed_form
from rydcavity.params import PhysicalParams, cavity_coupling
from rydcavity.potential import (
    MAGIC_ANGLE,
    PotentialCoefficients,
    angular_factor,
    classify_regime,
    coefficients,
    crossover_radii,
    crossover_radii_closed_form,
    special_case_potential,
    u_tilde,
)
from rydcavity.units import UNITS

K = UNITS.dipole_coupling


def make(delta=300.0, Delta=-500.0, mu=200.0, mu_b=None, V=2.0e5):
    return PhysicalParams.from_detunings(1.0e6, delta, Delta, mu, mode_volume=V, mu_b=mu_b)


def test_equal_dipole_coefficients():
    p = make()
    g = cavity_coupling(p)
    d, D, mu = p.delta, p.Delta, p.mu_a
    c = coefficients(p)
    assert c.C0 == pytest.approx(2 * g**4 / d**2 * (1 / D + 1 / d), rel=1e-13)
    assert c.C3 == pytest.approx(2 * mu**2 * K * g**2 / d * (2 / D + 1 / d), rel=1e-13)
    assert c.C6 == pytest.approx(2 * mu**4 * K**2 / D, rel=1e-13)
    assert c.R**3 == pytest.approx(abs(d) * p.mode_volume / (4 * math.pi * p.omega_cav), rel=1e-12)
    assert c.r0 == pytest.approx(math.sqrt(2) * (mu * mu * K / abs(D)) ** (1 / 3))


@pytest.mark.parametrize("mu_b", [None, 55.0])
def test_coefficients_reproduce_pair_interaction(mu_b):
    p = make(mu_b=mu_b)
    c = coefficients(p)
    ga, gb = cavity_coupling(p, "a"), cavity_coupling(p, "b")
    for r in (0.7, 2.0, 9.0):
        U = p.mu_a * p.mu_b * K / r**3
        J = p.mu_a**2 * K / r**3
        pair = perturbation_closed_form(p, U, J, ga, gb, ga, gb).pair_interaction
        assert u_tilde(r, c=c) == pytest.approx(pair, rel=1e-12)


def test_coefficient_domain():
    with pytest.raises(DomainError):
        coefficients(make(delta=0.0))
    with pytest.raises(DomainError):
        u_tilde(0.0, c=PotentialCoefficients(1, 1, 1))


def test_angular_mode():
    c = PotentialCoefficients(C0=1.0, C3=8.0, C6=16.0)
    assert u_tilde(1.0, math.pi / 2, c, "angular") == pytest.approx(25.0)
    assert u_tilde(1.0, math.pi / 2, c, "angular") == u_tilde(1.0, c=c)
    assert u_tilde(3.0, MAGIC_ANGLE, c, "angular") == pytest.approx(1.0, abs=1e-14)
    assert angular_factor(0.0) == pytest.approx(-2.0)
    # curvature at theta = pi/2: -6 (C3/r^3 + 2 C6/r^6)
    h = 1e-4
    th = math.pi / 2
    r = 1.3
    second = (u_tilde(r, th + h, c, "angular") - 2 * u_tilde(r, th, c, "angular")
              + u_tilde(r, th - h, c, "angular")) / h**2
    assert second == pytest.approx(-6 * (c.C3 / r**3 + 2 * c.C6 / r**6), rel=1e-6)
    with pytest.raises(ValueError):
        u_tilde(1.0, c=c, mode="sideways")


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 50.0), st.floats(-3.0, 3.0).filter(lambda x: abs(x) > 0.05),
       st.floats(1e-3, 10.0), st.floats(-100, 100))
def test_r1_and_r2_defining_equations(c3, c6sign, c6mag, c0):
    c = PotentialCoefficients(C0=c0 if abs(c0) > 1e-6 else 1.0, C3=c3, C6=math.copysign(c6mag, c6sign))
    rad = crossover_radii(c)
    assert abs(c.C3) / rad.r1**3 == pytest.approx(abs(c.C6) / rad.r1**6, rel=1e-10)
    x = 1.0 / rad.r2_star**3
    assert abs(c.C3 * x + c.C6 * x * x) == pytest.approx(abs(c.C0), rel=1e-9)


def test_closed_form_radii_match_coefficient_route():
    for delta, Delta in ((300.0, -500.0), (300.0, 500.0), (-300.0, 800.0), (-250.0, -400.0)):
        p = make(delta, Delta)
        c = coefficients(p)
        r1, r2 = crossover_radii_closed_form(c.R, delta, Delta)
        rad = crossover_radii(c)
        assert r1 == pytest.approx(rad.r1, rel=1e-12)
        assert r2 == pytest.approx(rad.r2, rel=1e-12)
        x = 1.0 / r2**3
        assert c.C3 * x + c.C6 * x * x == pytest.approx(abs(c.C0), rel=1e-10) or \
            c.C3 * x + c.C6 * x * x == pytest.approx(-abs(c.C0), rel=1e-10)


@pytest.mark.parametrize("delta", [300.0, -300.0])
def test_special_detunings(delta):
    r = np.geomspace(0.3, 40.0, 60)
    half = coefficients(make(delta=delta, Delta=-2 * delta))
    assert np.allclose(u_tilde(r, c=half), special_case_potential(half, "half_delta", r), rtol=1e-10, atol=0)
    full = coefficients(make(delta=delta, Delta=-delta))
    assert np.allclose(u_tilde(r, c=full), special_case_potential(full, "full_delta", r), rtol=1e-10, atol=0)
    with pytest.raises(PreconditionError):
        special_case_potential(full, "half_delta", r)
    with pytest.raises(PreconditionError):
        special_case_potential(PotentialCoefficients(1, 1, 1), "full_delta", r)


def test_regimes_are_ordered():
    c = PotentialCoefficients(C0=0.01, C3=10.0, C6=1.0, r0=0.2)
    rad = crossover_radii(c)
    assert rad.r0 < rad.r1 < rad.r2_star
    labels = [classify_regime(c, r, rad) for r in np.geomspace(rad.r0 / 2, rad.r2_star * 2, 400)]
    order = ["below_validity", "free_vdW", "dipole_dipole", "all_to_all"]
    firsts = [labels.index(x) for x in order]
    assert firsts == sorted(firsts)
    assert classify_regime(c, rad.r2_star * 1.01) == "all_to_all"
    with pytest.raises(DomainError):
        classify_regime(c, 0.0)


def test_kappa_and_eta():
    c = PotentialCoefficients(1.0, 2.5, 10.0)
    assert c.eta == pytest.approx(1.6)
    assert c.kappa(0.35) == pytest.approx(4 * math.pi * 0.35 * 2.5 / 3)


def test_constant_dominates_when_r2_below_r1():
    # strong C0: the van der Waals core hands over directly to the constant
    c = coefficients(make(delta=300.0, Delta=-500.0))
    rad = crossover_radii(c)
    assert rad.r2_star < rad.r1
    assert classify_regime(c, 0.5 * (rad.r0 + rad.r2_star)) == "free_vdW"
    assert classify_regime(c, 0.5 * (rad.r2_star + rad.r1)) == "all_to_all"


@pytest.mark.parametrize("delta", [45.0, -300.0, 1234.5])
def test_special_detuning_cancellations_are_exact(delta):
    full = coefficients(PhysicalParams.from_detunings(1.0e6, delta, -delta, 150.0, mode_volume=3.0e5))
    half = coefficients(PhysicalParams.from_detunings(1.0e6, delta, -2 * delta, 150.0, mode_volume=3.0e5))
    assert full.C0 == 0.0
    assert half.C3 == 0.0
