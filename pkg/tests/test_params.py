from __future__ import annotations

import math

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import constants as sc

from rydcavity.errors import ConfigError, DegenerateDetuningWarning, DomainError
from rydcavity.params import PhysicalParams, cavity_coupling, cavity_vdw_radius, validate_perturbative
from rydcavity.units import TWO_PI, UNITS, factor, from_internal, to_internal

GHZ = TWO_PI * 1e3
THZ = TWO_PI * 1e6


def params(omega_d=1.7 * THZ, delta=0.12 * GHZ, Delta=31 * GHZ, mu=100.0, **kw):
    return PhysicalParams.from_detunings(omega_d, delta, Delta, mu, **kw)


# ------------------------------------------------------------------ units --

@pytest.mark.parametrize("dim,unit", [("frequency", "GHz"), ("frequency", "rad/ns"), ("length", "nm"),
                                      ("length", "a0"), ("time", "ms"), ("dipole", "D"), ("dipole", "Cm"),
                                      ("density", "cm^-3"), ("volume", "mm3"), ("volume", "m^3"),
                                      ("C3", "MHz*um3"), ("C6", "GHz*um^6"), ("angle", "deg")])
@given(x=st.floats(min_value=-1e12, max_value=1e12, allow_nan=False).filter(lambda v: abs(v) > 1e-12))
def test_unit_round_trip(dim, unit, x):
    assert from_internal(to_internal(x, unit, dim), unit, dim) == pytest.approx(x, rel=1e-12)


def test_si_round_trip_and_values():
    for dim in ("frequency", "length", "time", "volume", "density", "C3", "C6"):
        v = 3.7
        assert UNITS.to_si(UNITS.from_si(v, dim), dim) == pytest.approx(v, rel=1e-12)
    assert to_internal(1.0, "MHz", "frequency") == pytest.approx(TWO_PI)
    assert to_internal(1.0, "rad/us", "frequency") == 1.0
    assert UNITS.c == pytest.approx(299792458.0)
    # K = (a0 e)^2 / (4 pi eps0 hbar) in rad/us um^3
    K = (sc.physical_constants["Bohr radius"][0] * sc.e) ** 2 / (4 * math.pi * sc.epsilon_0 * sc.hbar)
    assert UNITS.dipole_coupling == pytest.approx(K * 1e18 / 1e6, rel=1e-12)


def test_unknown_unit_rejected():
    with pytest.raises(ConfigError):
        factor("furlong", "length")
    with pytest.raises(ConfigError):
        factor("GHz", "length")


# ---------------------------------------------------------------- coupling --

def test_coupling_zero_dipole_and_scaling():
    p = params(mu=0.0)
    assert cavity_coupling(p) == 0.0
    p = params()
    q = PhysicalParams(**{**p.__dict__, "mode_volume": 4 * p.mode_volume})
    assert cavity_coupling(q) == pytest.approx(cavity_coupling(p) / 2, rel=1e-14)


@given(st.floats(0.1, 1e3), st.floats(0.01, 100.0), st.floats(1e-3, 1e3))
def test_coupling_homogeneity(mu, lam, vscale):
    p = params(mu=mu, mode_volume=1e6)
    q = params(mu=lam * mu, mode_volume=1e6 * vscale)
    assert cavity_coupling(q) == pytest.approx(cavity_coupling(p) * lam / math.sqrt(vscale), rel=1e-12)


def test_coupling_matches_si_formula():
    mp.mp.dps = 30
    p = params(omega_d=57 * THZ, delta=14 * GHZ, Delta=2.4e4 * GHZ, mu=10.0)
    a0e = mp.mpf(sc.physical_constants["Bohr radius"][0]) * mp.mpf(sc.e)
    w = (mp.mpf(57e12) - mp.mpf(14e9)) * 2 * mp.pi  # rad/s
    lam = 2 * mp.pi * mp.mpf(sc.c) / w
    V = (lam / 2) ** 3
    g = 10 * a0e * mp.sqrt(w / (2 * mp.mpf(sc.epsilon_0) * mp.mpf(sc.hbar) * V))  # rad/s
    assert cavity_coupling(p) == pytest.approx(float(g / 1e6), rel=1e-12)
    # order of magnitude of the tabulated 1.4e3 MHz
    assert 0.1 < cavity_coupling(p) / TWO_PI / 1.4e3 < 10


def test_coupling_amplitude_override_and_errors():
    p = params()
    assert cavity_coupling(p, amplitude=0.5) == pytest.approx(0.5 * cavity_coupling(p))
    with pytest.raises(ValueError):
        cavity_coupling(p, which="c")
    with pytest.raises(DomainError):
        PhysicalParams(1.0, 2.0, 1.0, 1.0, 1.0, mode_volume=0.0)
    with pytest.raises(DomainError):
        PhysicalParams(1.0, 2.0, 1.0, -1.0, 1.0, mode_volume=1.0)
    with pytest.raises(DomainError):
        PhysicalParams(1.0, 2.0, 0.0, 1.0, 1.0, mode_volume=1.0)


# ------------------------------------------------------------------ radius --

def test_vdw_radius_against_high_precision():
    mp.mp.dps = 30
    p = params()  # delta = 2 pi 0.12 GHz, omega_d = 2 pi 1.7 THz
    w = (mp.mpf("1.7e12") - mp.mpf("0.12e9")) * 2 * mp.pi
    lam = 2 * mp.pi * mp.mpf(sc.c) / w
    V = (lam / 2) ** 3
    R3 = 2 * mp.pi * mp.mpf("0.12e9") * V / (4 * mp.pi * w)  # m^3
    assert cavity_vdw_radius(p) == pytest.approx(float(mp.cbrt(R3) * 1e6), rel=1e-12)


def test_vdw_radius_scaling_and_degenerate():
    p = params(mode_volume=1e7)
    q = params(mode_volume=8e7)
    assert cavity_vdw_radius(q) == pytest.approx(2 * cavity_vdw_radius(p), rel=1e-14)
    with pytest.warns(DegenerateDetuningWarning):
        assert cavity_vdw_radius(params(delta=0.0)) == 0.0


@given(st.floats(1e-3, 1e3), st.floats(1.0, 1e6), st.floats(1.0, 1e9))
def test_vdw_radius_inverse_identity(delta, omega, V):
    p = PhysicalParams(omega_d=omega + delta, omega_p=2 * (omega + delta), omega_cav=omega,
                       mu_a=1.0, mu_b=1.0, mode_volume=V)
    R = cavity_vdw_radius(p)
    assert R**3 * 4 * math.pi * p.omega_cav / V == pytest.approx(abs(p.delta), rel=1e-12)


# ------------------------------------------------------------ perturbative --

def test_gate_zero_couplings_pass_with_infinite_ratios():
    rep = validate_perturbative(params(mu=0.0))
    assert rep.passed
    assert all(v == math.inf for v in rep.ratios.values())


def test_gate_boundary_passes():
    p = params()
    g = cavity_coupling(p)
    rep = validate_perturbative(p, g=p.delta / 10.0)
    assert rep.passed and rep.ratios["delta/g"] == pytest.approx(10.0)
    rep = validate_perturbative(p, g=p.delta / 9.99)
    assert not rep.passed and rep.failing() == ["delta/g"]
    assert g > 0


def test_gate_on_reference_rows():
    # 5D and 35D pass; 12D sits just below the threshold (|delta|/g ~ 9.74)
    from rydcavity.crosscheck import reference_rows

    result = {r.label: validate_perturbative(r.params) for r in reference_rows()}
    assert result["5D5/2"].passed
    assert result["35D5/2"].passed
    assert not result["12D5/2"].passed
    assert result["12D5/2"].ratios["delta/g"] == pytest.approx(9.737, abs=1e-3)


def test_detunings_are_kept_exactly():
    p = params(omega_d=1.7 * THZ, delta=45.0, Delta=-45.0)
    assert p.delta == 45.0 and p.Delta == -45.0
    assert p.delta + p.Delta == 0.0
    with pytest.raises(DomainError):
        PhysicalParams(omega_d=100.0, omega_p=200.0, omega_cav=90.0, mu_a=1.0, mu_b=1.0,
                       mode_volume=1.0, exact_detunings=(11.0, 0.0))
    # absolute-frequency form falls back to the differences
    q = PhysicalParams(omega_d=100.0, omega_p=150.0, omega_cav=90.0, mu_a=1.0, mu_b=1.0, mode_volume=1.0)
    assert (q.delta, q.Delta) == (10.0, 50.0)
