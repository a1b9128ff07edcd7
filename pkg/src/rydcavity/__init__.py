"""Cavity-mediated Rydberg pair interactions and Ramsey contrast of dense ensembles.

Modules
-------
units, params
    Unit conversion, physical parameters, cavity coupling and radius.
pairham
    Two-atom cavity Hamiltonian, Jacobi eigensolver, fourth-order perturbation theory.
potential
    C0 + C3/r^3 + C6/r^6 pair potential, crossover radii and regimes.
specfun
    Sine/cosine and Fresnel integrals and their damped variants.
ramsey
    Exact, all-to-all, Monte Carlo, continuum and large-N Ramsey contrast.
config, cli
    Unit-tagged JSON scenarios and the ``rydcavity`` command line.
"""

from __future__ import annotations

from .io import package_version
from .params import PhysicalParams, cavity_coupling, cavity_vdw_radius
from .potential import PotentialCoefficients, coefficients, u_tilde

__version__ = package_version()

__all__ = [
    "PhysicalParams",
    "PotentialCoefficients",
    "cavity_coupling",
    "cavity_vdw_radius",
    "coefficients",
    "u_tilde",
    "__version__",
]
