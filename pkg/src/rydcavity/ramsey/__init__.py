"""Ramsey interferometry of cavity-coupled Rydberg ensembles."""

from .analytic import (
    contrast_all_to_all,
    contrast_asymptotic,
    free_space_contrast,
    fringe_frequency,
    gamma_continuum,
    gamma_largeN,
    ramsey_signal,
)
from .ensemble import (
    MODES,
    EnsembleRealization,
    RamseyConfig,
    RamseySeries,
    g_exact,
    monte_carlo_contrast,
    sample_positions,
    sphere_radius,
)

__all__ = [
    "MODES",
    "EnsembleRealization",
    "RamseyConfig",
    "RamseySeries",
    "g_exact",
    "monte_carlo_contrast",
    "sample_positions",
    "sphere_radius",
    "contrast_all_to_all",
    "contrast_asymptotic",
    "free_space_contrast",
    "fringe_frequency",
    "gamma_continuum",
    "gamma_largeN",
    "ramsey_signal",
]
