"""Effective pair potential U~(r) = C0 + C3/r^3 + C6/r^6 and its distance regimes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, PreconditionError
from .params import PhysicalParams, cavity_coupling, cavity_vdw_radius
from .units import UNITS

__all__ = [
    "PotentialCoefficients",
    "CrossoverRadii",
    "MAGIC_ANGLE",
    "angular_factor",
    "coefficients",
    "u_tilde",
    "crossover_radii",
    "crossover_radii_closed_form",
    "special_case_potential",
    "classify_regime",
    "REGIMES",
]

MAGIC_ANGLE = math.acos(1.0 / math.sqrt(3.0))
REGIMES = ("below_validity", "free_vdW", "dipole_dipole", "all_to_all")


def angular_factor(theta):
    """1 - 3 cos^2(theta) for the angle between dipoles and the pair axis."""
    c = np.cos(theta)
    return 1.0 - 3.0 * c * c


@dataclass(frozen=True)
class PotentialCoefficients:
    """C0 [rad/us], C3 [rad/us um^3], C6 [rad/us um^6] plus optional provenance.

    ``R``, ``r0``, ``delta`` and ``Delta`` are filled in by :func:`coefficients`
    and stay ``None`` for directly specified coefficients.
    """

    C0: float
    C3: float
    C6: float
    R: float | None = None
    r0: float | None = None
    delta: float | None = None
    Delta: float | None = None

    @property
    def eta(self) -> float:
        return math.inf if self.C3 == 0 else self.C6 / self.C3**2

    @property
    def sign_delta(self) -> int | None:
        if self.delta is None:
            return None
        return 1 if self.delta >= 0 else -1

    def kappa(self, density: float) -> float:
        """kappa = 4 pi n C3 / 3 for atom density ``density`` in um^-3."""
        return 4.0 * math.pi * density * self.C3 / 3.0

    @property
    def radii(self) -> "CrossoverRadii":
        return crossover_radii(self)


def coefficients(p: PhysicalParams) -> PotentialCoefficients:
    """C0, C3, C6 of two atoms with couplings ``g_a``, ``g_b`` from ``p``.

    Derived from the fourth-order pair interaction with U = mu_a mu_b / r^3 and
    J = mu_a^2 / r^3 (in units of 1/(4 pi eps0 hbar)); reduces to the familiar
    equal-dipole expressions when ``mu_a == mu_b``.
    """
    d, D = p.delta, p.Delta
    if d == 0 or D == 0:
        raise DomainError("coefficients need nonzero cavity and Foerster detunings")
    K = UNITS.dipole_coupling
    ga = cavity_coupling(p, "a")
    gb = cavity_coupling(p, "b")
    uab = p.mu_a * p.mu_b * K  # U * r^3
    jaa = p.mu_a**2 * K  # J * r^3
    # grouped so that the cancellations at Delta = -delta and Delta = -2 delta are exact
    C0 = 2.0 * ga**2 * (gb**2 / D + ga**2 / d) / (d * d)
    C3 = 2.0 * ga * (2.0 * uab * gb / D + jaa * ga / d) / d
    C6 = 2.0 * uab**2 / D
    r0 = math.sqrt(2.0) * (uab / abs(D)) ** (1.0 / 3.0)
    return PotentialCoefficients(C0, C3, C6, R=cavity_vdw_radius(p), r0=r0, delta=d, Delta=D)


def u_tilde(r, theta=math.pi / 2, c: PotentialCoefficients | None = None, mode: str = "isotropic"):
    """Pair potential at distance ``r`` (um).

    ``mode="angular"`` weights C3 by f(theta) = 1 - 3cos^2(theta) and C6 by f^2.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("u_tilde needs r > 0")
    inv3 = 1.0 / r**3
    if mode == "isotropic":
        out = c.C0 + c.C3 * inv3 + c.C6 * inv3 * inv3
    elif mode == "angular":
        f = angular_factor(theta)
        out = c.C0 + f * c.C3 * inv3 + f * f * c.C6 * inv3 * inv3
    else:
        raise ValueError(f"mode must be 'isotropic' or 'angular', got {mode!r}")
    return out if out.ndim else float(out)


class CrossoverRadii(NamedTuple):
    r0: float
    r1: float
    r2: float
    r2_star: float


def crossover_radii_closed_form(R: float, delta: float, Delta: float) -> tuple[float, float]:
    """(r1, r2) from the cavity radius and the detunings (equal dipoles).

    r1 solves |C3/r^3| = |C6/r^6|.  r2 is the positive-branch root of
    |C3/r^3 + C6/r^6| = |C0|; with y = (R/r)^3, a = 1 + Delta/(2 delta) and
    b = 1 + Delta/delta it reads y = (sqrt(a^2 + |b|) - a sgn(delta)) / 2.
    """
    a = 1.0 + Delta / (2.0 * delta)
    b = 1.0 + Delta / delta
    r1 = math.inf if a == 0 else R / abs(a) ** (1.0 / 3.0)
    s = 1.0 if delta > 0 else -1.0
    y = 0.5 * (math.sqrt(a * a + abs(b)) - a * s)
    r2 = math.inf if y <= 0 else R / y ** (1.0 / 3.0)
    return r1, r2


def _r2_numeric(c: PotentialCoefficients) -> float:
    """Outermost r with |C3/r^3 + C6/r^6| = |C0|, by bracketing and bisection."""
    if c.C0 == 0:
        return math.inf
    if c.C3 == 0 and c.C6 == 0:
        return 0.0
    target = abs(c.C0)

    def h(r):
        x = 1.0 / r**3
        return abs(c.C3 * x + c.C6 * x * x) - target

    scale = max((abs(c.C3) / target) ** (1 / 3), (abs(c.C6) / target) ** (1 / 6))
    hi = 10.0 * scale
    while h(hi) >= 0:
        hi *= 10.0
    lo = hi
    while h(lo) < 0:
        lo /= 1.02
        if lo < 1e-12 * scale:
            return 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if h(mid) < 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def crossover_radii(c: PotentialCoefficients) -> CrossoverRadii:
    """r0 (validity), r1 (r^-6 to r^-3), r2 (closed form) and r2* (numeric root).

    r1 and r2 use the coefficients directly so they also work for directly
    specified C's; ``r2_star`` is the outermost solution of the defining equation.
    """
    r0 = 0.0 if c.r0 is None else c.r0
    r1 = math.inf if c.C3 == 0 else abs(c.C6 / c.C3) ** (1.0 / 3.0)
    if c.C0 == 0 or c.C6 == 0:
        r2 = math.inf if c.C0 == 0 else abs(c.C3 / c.C0) ** (1.0 / 3.0)
    else:
        p = c.C3 / c.C6
        q = abs(c.C0 / c.C6)
        y = 0.5 * (math.sqrt(p * p + 4.0 * q) - p)  # y = 1/r^3
        r2 = math.inf if y <= 0 else y ** (-1.0 / 3.0)
    return CrossoverRadii(r0, r1, r2, _r2_numeric(c))


def special_case_potential(c: PotentialCoefficients, case: str, r, rtol: float = 1e-9):
    """Potential at the two special cavity detunings.

    ``half_delta`` (delta = -Delta/2): C6 (1/r^6 - 1/(4 R^6)), a van der Waals core
    on a constant background.  ``full_delta`` (delta = -Delta): C6 (1/r^6 +
    sgn(delta)/(2 R^3 r^3)), i.e. a dipolar tail that is attractive for delta < 0.
    """
    if c.delta is None or c.Delta is None or c.R is None:
        raise PreconditionError("special cases need coefficients built from physical parameters")
    d, D = c.delta, c.Delta
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("r must be positive")
    R3 = c.R**3
    if case == "half_delta":
        if abs(d + D / 2.0) > rtol * abs(d):
            raise PreconditionError(f"half_delta needs delta = -Delta/2 (delta={d}, Delta={D})")
        out = c.C6 * (1.0 / r**6 - 1.0 / (4.0 * R3 * R3))
    elif case == "full_delta":
        if abs(d + D) > rtol * abs(d):
            raise PreconditionError(f"full_delta needs delta = -Delta (delta={d}, Delta={D})")
        s = 1.0 if d > 0 else -1.0
        out = c.C6 * (1.0 / r**6 + s / (2.0 * R3 * r**3))
    else:
        raise ValueError(f"unknown special case {case!r}")
    return out if out.ndim else float(out)


def classify_regime(c: PotentialCoefficients, r: float, radii: CrossoverRadii | None = None) -> str:
    """Which term governs U~ at ``r``; uses the numerically solved r2*."""
    if not r > 0:
        raise DomainError("r must be positive")
    radii = crossover_radii(c) if radii is None else radii
    if r <= radii.r0:
        return "below_validity"
    if r >= radii.r2_star:
        return "all_to_all"
    if r < radii.r1:
        return "free_vdW"
    return "dipole_dipole"
