"""Physical input parameters and the cavity quantities derived from them."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .errors import DegenerateDetuningWarning, DomainError
from .units import UNITS

__all__ = [
    "PhysicalParams",
    "PerturbativeReport",
    "cavity_coupling",
    "cavity_vdw_radius",
    "validate_perturbative",
]


@dataclass(frozen=True)
class PhysicalParams:
    """Level energies, dipoles and cavity geometry of one atomic species.

    Frequencies are angular (rad/us) and measured from level ``f``; dipoles are in
    a0*e and the mode volume in um^3.  Use :meth:`from_detunings` to build a set
    from the cavity and Foerster detunings instead of absolute level energies.
    """

    omega_d: float
    omega_p: float
    omega_cav: float
    mu_a: float
    mu_b: float
    mode_volume: float
    mode_amplitude: float = 1.0
    omega_g: float = 0.0
    # (delta, Delta) as given to from_detunings; differences of large absolute
    # frequencies lose the digits that identities such as delta = -Delta need
    exact_detunings: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.mode_volume > 0:
            raise DomainError(f"mode_volume must be positive, got {self.mode_volume}")
        if self.mu_a < 0 or self.mu_b < 0:
            raise DomainError("dipole moments must be non-negative")
        if not self.omega_cav > 0:
            raise DomainError(f"omega_cav must be positive, got {self.omega_cav}")
        if self.exact_detunings is not None:
            d, D = self.exact_detunings
            tol = 1e-12 * max(abs(self.omega_d), abs(self.omega_p), 1.0)
            if abs(d - (self.omega_d - self.omega_cav)) > tol or abs(D - (2.0 * self.omega_d - self.omega_p)) > 2 * tol:
                raise DomainError("exact_detunings disagree with the level energies")

    @classmethod
    def from_detunings(
        cls,
        omega_d: float,
        delta: float,
        Delta: float,
        mu: float,
        mode_volume: float | None = None,
        mu_b: float | None = None,
        mode_amplitude: float = 1.0,
        omega_g: float = 0.0,
    ) -> "PhysicalParams":
        """Build from ``delta = omega_d - omega`` and ``Delta = 2 omega_d - omega_p``.

        ``mu`` sets both transition dipoles unless ``mu_b`` is given.  Without a
        ``mode_volume`` the half-wavelength cube (lambda/2)^3 of the cavity mode
        is used.
        """
        omega_cav = omega_d - delta
        if not omega_cav > 0:
            raise DomainError("delta must leave a positive cavity frequency")
        if mode_volume is None:
            mode_volume = UNITS.half_wavelength_volume(omega_cav)
        return cls(
            omega_d=omega_d,
            omega_p=2.0 * omega_d - Delta,
            omega_cav=omega_cav,
            mu_a=mu,
            mu_b=mu if mu_b is None else mu_b,
            mode_volume=mode_volume,
            mode_amplitude=mode_amplitude,
            omega_g=omega_g,
            exact_detunings=(float(delta), float(Delta)),
        )

    @property
    def delta(self) -> float:
        """Cavity detuning omega_d - omega."""
        if self.exact_detunings is not None:
            return self.exact_detunings[0]
        return self.omega_d - self.omega_cav

    @property
    def Delta(self) -> float:
        """Foerster detuning 2 omega_d - omega_p."""
        if self.exact_detunings is not None:
            return self.exact_detunings[1]
        return 2.0 * self.omega_d - self.omega_p


def cavity_coupling(p: PhysicalParams, which: str = "a", amplitude: float | None = None) -> float:
    """Jaynes-Cummings coupling g = mu sqrt(omega / (2 eps0 hbar V)) Phi in rad/us.

    ``which`` selects the f<->d (``"a"``) or d<->p (``"b"``) dipole.  ``amplitude``
    overrides the mode-function value for a single atom.
    """
    if not p.mode_volume > 0:
        raise DomainError("mode volume must be positive")
    if which == "a":
        mu = p.mu_a
    elif which == "b":
        mu = p.mu_b
    else:
        raise ValueError(f"which must be 'a' or 'b', got {which!r}")
    phi = p.mode_amplitude if amplitude is None else amplitude
    # 1/(2 eps0 hbar) = 2 pi / (4 pi eps0 hbar)
    return mu * math.sqrt(2.0 * math.pi * UNITS.dipole_coupling * p.omega_cav / p.mode_volume) * phi


def cavity_vdw_radius(p: PhysicalParams) -> float:
    """Cavity van der Waals radius R with R^3 = |delta| V / (4 pi omega), in um."""
    if p.delta == 0:
        warnings.warn("cavity detuning is zero; R degenerates to 0", DegenerateDetuningWarning, stacklevel=2)
        return 0.0
    return (abs(p.delta) * p.mode_volume / (4.0 * math.pi * p.omega_cav)) ** (1.0 / 3.0)


@dataclass(frozen=True)
class PerturbativeReport:
    ratios: dict = field(default_factory=dict)
    threshold: float = 10.0
    passed: bool = True

    def failing(self) -> list[str]:
        return [k for k, v in self.ratios.items() if v < self.threshold * (1 - 1e-12)]


def _ratio(num: float, den: float) -> float:
    return math.inf if den == 0 else abs(num) / abs(den)


def validate_perturbative(
    p: PhysicalParams,
    U: float = 0.0,
    J: float = 0.0,
    threshold: float = 10.0,
    g: float | None = None,
) -> PerturbativeReport:
    """Check |delta|, |Delta| >> g, U, J.

    ``g`` defaults to the larger of the two cavity couplings.  Ratios with a
    vanishing denominator are reported as ``math.inf``.  A ratio equal to the
    threshold (up to rounding) passes.
    """
    if g is None:
        g = max(cavity_coupling(p, "a"), cavity_coupling(p, "b"))
    d, D = p.delta, p.Delta
    ratios = {
        "delta/g": _ratio(d, g),
        "Delta/g": _ratio(D, g),
        "delta/U": _ratio(d, U),
        "Delta/U": _ratio(D, U),
        "delta/J": _ratio(d, J),
    }
    report = PerturbativeReport(ratios=ratios, threshold=threshold)
    return PerturbativeReport(ratios=ratios, threshold=threshold, passed=not report.failing())
