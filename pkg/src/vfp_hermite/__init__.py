"""Hermite-in-velocity / finite-volume-in-space solver for the 1D kinetic
Fokker-Planck equation with an external potential.

The package provides the well-balanced transport operators, the implicit
Euler stepper for the coupled Hermite system, the drift-diffusion limit
stepper, and the entropy / norm diagnostics used to measure decay rates
and asymptotic-preserving behavior.
"""

from .mesh import Mesh, build_perturbed_mesh, build_uniform_mesh, regularity_ratio
from .equilibrium import EquilibriumField, PotentialSpec, discretize_equilibrium, sample_potential
from .hermite import CoefficientField, InitialDataSpec, project_initial, reconstruct_f

__all__ = [
    "Mesh",
    "build_uniform_mesh",
    "build_perturbed_mesh",
    "regularity_ratio",
    "PotentialSpec",
    "EquilibriumField",
    "sample_potential",
    "discretize_equilibrium",
    "CoefficientField",
    "InitialDataSpec",
    "project_initial",
    "reconstruct_f",
]

__version__ = "0.1.0"
