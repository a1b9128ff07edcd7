"""Unit conventions.

Internally every length is in micrometres, every time in microseconds and every
frequency is an *angular* frequency in rad/us (so energies carry an implicit
hbar).  Dipole moments are kept in atomic units (a0 * e).  Ordinary frequencies
given at the boundary (Hz, MHz, GHz, THz) are multiplied by 2*pi on the way in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants as _sc

from .errors import ConfigError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class UnitSystem:
    """CODATA constants and the conversion factors derived from them."""

    bohr_radius: float = _sc.physical_constants["Bohr radius"][0]  # m
    elementary_charge: float = _sc.e  # C
    epsilon_0: float = _sc.epsilon_0  # F/m
    hbar: float = _sc.hbar  # J s
    speed_of_light: float = _sc.c  # m/s

    @property
    def atomic_dipole(self) -> float:
        """One a0*e in C*m."""
        return self.bohr_radius * self.elementary_charge

    @property
    def dipole_coupling(self) -> float:
        """(a0 e)^2 / (4 pi eps0 hbar) in rad/us * um^3."""
        si = self.atomic_dipole**2 / (4.0 * math.pi * self.epsilon_0 * self.hbar)
        return si * _SI_SCALE["C3"]

    @property
    def c(self) -> float:
        """Speed of light in um/us (numerically equal to m/s)."""
        return self.speed_of_light * _SI_SCALE["velocity"]

    def half_wavelength_volume(self, omega: float) -> float:
        """(lambda/2)^3 in um^3 for a mode of angular frequency ``omega`` (rad/us)."""
        lam = TWO_PI * self.c / omega
        return (0.5 * lam) ** 3

    # -- SI boundary ------------------------------------------------------
    def from_si(self, value: float, dimension: str) -> float:
        if dimension == "dipole":
            return value / self.atomic_dipole
        return value * _SI_SCALE[dimension]

    def to_si(self, value: float, dimension: str) -> float:
        if dimension == "dipole":
            return value * self.atomic_dipole
        return value / _SI_SCALE[dimension]


# internal = SI * factor
_SI_SCALE = {
    "frequency": 1e-6,  # rad/s -> rad/us
    "time": 1e6,  # s -> us
    "length": 1e6,  # m -> um
    "volume": 1e18,  # m^3 -> um^3
    "density": 1e-18,  # m^-3 -> um^-3
    "velocity": 1.0,  # m/s -> um/us
    "C3": 1e-6 * 1e18,  # rad/s m^3 -> rad/us um^3
    "C6": 1e-6 * 1e36,  # rad/s m^6 -> rad/us um^6
}

UNITS = UnitSystem()

# Boundary tags -> factor to internal units.  Ordinary frequencies carry 2*pi.
_FREQ = {
    "Hz": TWO_PI * 1e-6,
    "kHz": TWO_PI * 1e-3,
    "MHz": TWO_PI,
    "GHz": TWO_PI * 1e3,
    "THz": TWO_PI * 1e6,
    "rad/s": 1e-6,
    "rad/ms": 1e-3,
    "rad/us": 1.0,
    "rad/ns": 1e3,
}
_LENGTH = {
    "m": 1e6,
    "mm": 1e3,
    "um": 1.0,
    "nm": 1e-3,
    "a0": UNITS.bohr_radius * 1e6,
}
_TIME = {"s": 1e6, "ms": 1e3, "us": 1.0, "ns": 1e-3, "ps": 1e-6}
_DIPOLE = {"a0e": 1.0, "Cm": 1.0 / UNITS.atomic_dipole, "D": 3.33564095198e-30 / UNITS.atomic_dipole}
_DENSITY = {"um^-3": 1.0, "m^-3": 1e-18, "cm^-3": 1e-12}
_ANGLE = {"rad": 1.0, "deg": math.pi / 180.0}

DIMENSIONS = ("frequency", "length", "volume", "time", "dipole", "density", "angle", "C3", "C6")


def _split_power(tag: str) -> tuple[str, int]:
    for suffix, power in (("^3", 3), ("3", 3), ("^6", 6), ("6", 6)):
        if tag.endswith(suffix) and tag[: -len(suffix)] in _LENGTH:
            return tag[: -len(suffix)], power
    raise KeyError(tag)


def factor(unit: str, dimension: str) -> float:
    """Multiplicative factor taking a value tagged ``unit`` to internal units."""
    unit = unit.strip().replace(" ", "").replace("µ", "u").replace("μ", "u")
    try:
        if dimension == "frequency":
            return _FREQ[unit]
        if dimension == "length":
            return _LENGTH[unit]
        if dimension == "time":
            return _TIME[unit]
        if dimension == "dipole":
            return _DIPOLE[unit]
        if dimension == "density":
            return _DENSITY[unit]
        if dimension == "angle":
            return _ANGLE[unit]
        if dimension == "volume":
            base, power = _split_power(unit)
            if power != 3:
                raise KeyError(unit)
            return _LENGTH[base] ** 3
        if dimension in ("C3", "C6"):
            freq, _, length = unit.partition("*")
            base, power = _split_power(length)
            if power != int(dimension[1]):
                raise KeyError(unit)
            return _FREQ[freq] * _LENGTH[base] ** power
    except KeyError:
        pass
    raise ConfigError(f"unknown unit {unit!r} for a {dimension} quantity")


def to_internal(value: float, unit: str, dimension: str) -> float:
    return float(value) * factor(unit, dimension)


def from_internal(value: float, unit: str, dimension: str) -> float:
    return float(value) / factor(unit, dimension)


def to_ordinary_mhz(omega: float) -> float:
    """Angular frequency in rad/us -> ordinary frequency in MHz."""
    return omega / TWO_PI
