"""Discrete steady state and well-balanced electric field.

The steady density rho_inf = c0 exp(-Phi / T0) is normalized against the
discrete mass sum, and the discrete field E_j is built from the difference
quotient of sqrt(rho_inf).  That particular choice makes sqrt(rho_inf) an
exact kernel vector of the discrete transport operator; the centered
difference of Phi gives a field within O(h^2) of it but loses exact
well-balancing (it is kept behind a flag for ablation runs).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh

SQRT_RHO_FORM = "sqrt_rho"
PHI_DIFF_FORM = "phi_diff"


@dataclass(frozen=True)
class PotentialSpec:
    """External potential on [a, b): zero, a two-cosine profile, or tabulated values.

    The two-cosine profile is
        Phi(x) = amp1 * cos(2 pi mode1 x / L) + amp2 * cos(2 pi mode2 x / L)
    with L the domain length.
    """

    kind: str = "zero"
    amp1: float = 0.0
    amp2: float = 0.0
    mode1: int = 1
    mode2: int = 2
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("zero", "two_cosine", "tabulated"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "tabulated" and self.values is None:
            raise ValueError("tabulated potential needs values")


def sample_potential(spec: PotentialSpec, mesh: Mesh) -> np.ndarray:
    """Potential values at cell centers."""
    if spec.kind == "zero":
        return np.zeros(mesh.n_x)
    if spec.kind == "two_cosine":
        length = mesh.length
        x = mesh.x_center - mesh.a
        return spec.amp1 * np.cos(2.0 * np.pi * spec.mode1 * x / length) + spec.amp2 * np.cos(
            2.0 * np.pi * spec.mode2 * x / length
        )
    values = np.asarray(spec.values, dtype=float)
    if values.shape != (mesh.n_x,):
        raise ValueError(f"tabulated potential has {values.size} values, mesh has {mesh.n_x} cells")
    return values.copy()


@dataclass(frozen=True)
class EquilibriumField:
    """Sampled potential, steady density and discrete electric field.

    sqrt_rho_inf[j] > 0 holds for any finite potential, and
    E_j = (2 T0 / sqrt_rho_inf[j]) * (sqrt_rho_inf[j+1] - sqrt_rho_inf[j-1]) / (2 dx_j)
    is reproducible bitwise from sqrt_rho_inf when e_form == "sqrt_rho".
    """

    T0: float
    phi: np.ndarray
    E: np.ndarray
    sqrt_rho_inf: np.ndarray
    c0: float
    total_mass: float
    e_form: str = SQRT_RHO_FORM

    @property
    def rho_inf(self) -> np.ndarray:
        return self.sqrt_rho_inf**2

    @property
    def n_x(self) -> int:
        return self.phi.size


def electric_field_from_sqrt_rho(sqrt_rho_inf: np.ndarray, mesh: Mesh, T0: float) -> np.ndarray:
    """E_j from the sqrt(rho_inf) difference quotient (well-balanced form)."""
    diff = np.roll(sqrt_rho_inf, -1) - np.roll(sqrt_rho_inf, 1)
    return (2.0 * T0 / sqrt_rho_inf) * (diff / (2.0 * mesh.dx))


def electric_field_from_phi(phi: np.ndarray, mesh: Mesh) -> np.ndarray:
    """E_j = -(Phi_{j+1} - Phi_{j-1}) / (2 dx_j); consistent but not exactly well-balanced."""
    return -(np.roll(phi, -1) - np.roll(phi, 1)) / (2.0 * mesh.dx)


def discretize_equilibrium(
    phi_samples: np.ndarray,
    mesh: Mesh,
    T0: float,
    total_mass: float,
    e_form: str = SQRT_RHO_FORM,
) -> EquilibriumField:
    """Build the discrete steady state for a sampled potential.

    The normalization uses the discrete mass sum, so
    sum_j dx_j rho_inf_j == total_mass up to roundoff.
    """
    phi = np.asarray(phi_samples, dtype=float)
    if phi.shape != (mesh.n_x,):
        raise ValueError(f"potential has {phi.size} samples, mesh has {mesh.n_x} cells")
    if not np.isfinite(phi).all():
        raise ValueError("potential samples must be finite")
    if T0 <= 0:
        raise ValueError(f"temperature must be positive, got {T0}")
    if total_mass <= 0:
        raise ValueError(f"total mass must be positive, got {total_mass}")
    boltzmann = np.exp(-phi / T0)
    c0 = total_mass / float(np.sum(mesh.dx * boltzmann))
    sqrt_rho_inf = np.sqrt(c0 * boltzmann)
    if e_form == SQRT_RHO_FORM:
        e = electric_field_from_sqrt_rho(sqrt_rho_inf, mesh, T0)
    elif e_form == PHI_DIFF_FORM:
        e = electric_field_from_phi(phi, mesh)
    else:
        raise ValueError(f"unknown field form {e_form!r}")
    return EquilibriumField(
        T0=float(T0),
        phi=phi,
        E=e,
        sqrt_rho_inf=sqrt_rho_inf,
        c0=c0,
        total_mass=float(total_mass),
        e_form=e_form,
    )
