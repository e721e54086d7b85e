"""Hermite velocity basis, coefficient projection and reconstruction.

The basis functions Psi_k(v) = H_k(v / sqrt(T0)) M(v) use the orthonormal
Hermite recurrence throughout, so mode counts in the hundreds involve no
factorials.  M is the centered Maxwellian with temperature T0 and the
family is orthonormal against the weight 1 / M.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .equilibrium import EquilibriumField
from .mesh import Mesh


@lru_cache(maxsize=16)
def gauss_hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for integral of g(t) exp(-t^2) dt.

    Golub-Welsch on the symmetric Jacobi matrix; stays finite for orders in
    the hundreds where the series-based classical routine overflows.
    """
    if order < 1:
        raise ValueError(f"quadrature order must be positive, got {order}")
    off_diag = np.sqrt(np.arange(1, order) / 2.0)
    # bisection + inverse iteration: the default driver loses ~1e-5 of
    # weight accuracy at this order through the extreme eigenvectors
    nodes, vecs = eigh_tridiagonal(np.zeros(order), off_diag, lapack_driver="stebz")
    weights = np.sqrt(np.pi) * vecs[0, :] ** 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def hermite_function_values(k_max: int, v_grid: np.ndarray, T0: float = 1.0) -> np.ndarray:
    """Psi_k(v) for k = 0..k_max, shape (k_max + 1, len(v_grid)).

    The three-term recurrence runs directly on Psi (the Gaussian factor
    rides along), which keeps every intermediate bounded.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be nonnegative, got {k_max}")
    v = np.atleast_1d(np.asarray(v_grid, dtype=float))
    xi = v / np.sqrt(T0)
    maxwellian = np.exp(-(v**2) / (2.0 * T0)) / np.sqrt(2.0 * np.pi * T0)
    psi = np.empty((k_max + 1, v.size))
    psi[0] = maxwellian
    if k_max >= 1:
        psi[1] = xi * maxwellian
    for k in range(1, k_max):
        psi[k + 1] = (xi * psi[k] - np.sqrt(k) * psi[k - 1]) / np.sqrt(k + 1)
    return psi


def hermite_polynomial_values(k_max: int, xi: np.ndarray) -> np.ndarray:
    """Orthonormal Hermite polynomials H_k(xi) for k = 0..k_max."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    h = np.empty((k_max + 1, xi.size))
    h[0] = 1.0
    if k_max >= 1:
        h[1] = xi
    for k in range(1, k_max):
        h[k + 1] = (xi * h[k] - np.sqrt(k) * h[k - 1]) / np.sqrt(k + 1)
    return h


@dataclass(frozen=True)
class DensityProfile:
    """Spatial density rho_0: 1 + delta cos(2 pi x / L) or tabulated values."""

    delta: float = 0.0
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.values is None and not -1.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (-1, 1) so the density stays positive, got {self.delta}")

    def sample(self, mesh: Mesh) -> np.ndarray:
        if self.values is not None:
            values = np.asarray(self.values, dtype=float)
            if values.shape != (mesh.n_x,):
                raise ValueError(f"density table has {values.size} values, mesh has {mesh.n_x} cells")
            if (values <= 0).any():
                raise ValueError("tabulated density must be positive")
            return values.copy()
        x = mesh.x_center - mesh.a
        return 1.0 + self.delta * np.cos(2.0 * np.pi * x / mesh.length)


@dataclass(frozen=True)
class InitialDataSpec:
    """Initial phase-space data.

    kind "maxwellian_centered": rho_0(x) M(v); "maxwellian_shifted": the
    Maxwellian translated to bulk velocity u0; "coefficients": a raw
    coefficient matrix supplied directly.
    """

    kind: str = "maxwellian_centered"
    density: DensityProfile = DensityProfile()
    u0: float = 0.0
    T_init: float | None = None
    coefficients: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("maxwellian_centered", "maxwellian_shifted", "coefficients"):
            raise ValueError(f"unknown initial data kind {self.kind!r}")
        if self.kind == "coefficients" and self.coefficients is None:
            raise ValueError("coefficients kind needs a coefficient matrix")


@dataclass(frozen=True)
class CoefficientField:
    """Hermite coefficient matrix D, shape (n_h, n_x), row k = mode k.

    D relates to the plain coefficients through C_k = D_k * sqrt(rho_inf),
    so the weighted mass sum_j dx_j D_{0,j} sqrt(rho_inf)_j is the total
    mass of the reconstructed distribution.
    """

    D: np.ndarray
    field: EquilibriumField

    def __post_init__(self):
        if self.D.ndim != 2:
            raise ValueError("coefficient matrix must be 2D (modes x cells)")
        if self.D.shape[1] != self.field.n_x:
            raise ValueError(
                f"coefficient matrix has {self.D.shape[1]} cells, field has {self.field.n_x}"
            )
        if not np.isfinite(self.D).all():
            raise ValueError("coefficients must be finite")

    @property
    def n_h(self) -> int:
        return self.D.shape[0]

    @property
    def n_x(self) -> int:
        return self.D.shape[1]

    def copy(self) -> "CoefficientField":
        return CoefficientField(D=self.D.copy(), field=self.field)

    def weighted_mass(self, mesh: Mesh) -> float:
        return float(np.sum(mesh.dx * self.D[0] * self.field.sqrt_rho_inf))


def shifted_maxwellian_moments(n_h: int, u0: float, T0: float) -> np.ndarray:
    """m_k = integral of the u0-shifted Maxwellian against H_k(v / sqrt(T0)).

    Closed form mu^k / sqrt(k!) with mu = u0 / sqrt(T0), evaluated by the
    stable ratio recurrence.
    """
    mu = u0 / np.sqrt(T0)
    m = np.empty(n_h)
    m[0] = 1.0
    for k in range(1, n_h):
        m[k] = m[k - 1] * mu / np.sqrt(k)
    return m


def maxwellian_moments_quadrature(
    n_h: int, u0: float, T_init: float, T0: float, order: int
) -> np.ndarray:
    """Same moments by Gauss-Hermite quadrature, for validation and for
    initial temperatures differing from the background."""
    if n_h > order / 2:
        raise ValueError(f"n_h={n_h} exceeds the stability range of a {order}-point rule")
    nodes, weights = gauss_hermite_rule(order)
    xi = (u0 + np.sqrt(2.0 * T_init) * nodes) / np.sqrt(T0)
    h = hermite_polynomial_values(n_h - 1, xi)
    return (h * weights).sum(axis=1) / np.sqrt(np.pi)


def project_initial(
    spec: InitialDataSpec,
    field: EquilibriumField,
    mesh: Mesh,
    n_h: int,
    method: str = "auto",
    order: int | None = None,
) -> CoefficientField:
    """Project initial data onto the first n_h Hermite modes.

    Cell values use the density at cell centers (midpoint rule).  Maxwellian
    kinds at the background temperature use the closed-form moments; other
    temperatures go through Gauss-Hermite quadrature of order
    max(2 n_h, 64) unless overridden.
    """
    if n_h < 1:
        raise ValueError(f"need at least one mode, got n_h={n_h}")
    if spec.kind == "coefficients":
        coeffs = np.asarray(spec.coefficients, dtype=float)
        if coeffs.shape != (n_h, mesh.n_x):
            raise ValueError(f"coefficient matrix shape {coeffs.shape} != ({n_h}, {mesh.n_x})")
        return CoefficientField(D=coeffs.copy(), field=field)

    t_init = field.T0 if spec.T_init is None else spec.T_init
    rho0 = spec.density.sample(mesh)
    u0 = spec.u0 if spec.kind == "maxwellian_shifted" else 0.0
    analytic_ok = t_init == field.T0
    if method == "auto":
        method = "analytic" if analytic_ok else "quadrature"
    if method == "analytic":
        if not analytic_ok:
            raise ValueError("closed-form moments need T_init == T0")
        moments = shifted_maxwellian_moments(n_h, u0, field.T0)
    elif method == "quadrature":
        moments = maxwellian_moments_quadrature(
            n_h, u0, t_init, field.T0, order if order is not None else max(2 * n_h, 64)
        )
    else:
        raise ValueError(f"unknown projection method {method!r}")
    c = np.outer(moments, rho0)
    return CoefficientField(D=c / field.sqrt_rho_inf, field=field)


def project_phase_space(
    f_at_nodes: np.ndarray,
    field: EquilibriumField,
    n_h: int,
    order: int,
    T0: float | None = None,
) -> np.ndarray:
    """Coefficients C_k(x) of f sampled at the scaled quadrature nodes.

    f_at_nodes has shape (n_x, order) with velocities sqrt(2 T0) t_i.  The
    exp(t^2) reweighting caps the usable order near 180; beyond that the
    weights degenerate and the request is rejected.
    """
    T0 = field.T0 if T0 is None else T0
    if n_h > order / 2:
        raise ValueError(f"n_h={n_h} exceeds the stability range of a {order}-point rule")
    nodes, weights = gauss_hermite_rule(order)
    reweight = weights * np.exp(nodes**2)
    if not np.isfinite(reweight).all():
        raise ValueError(f"order {order} too large for sample-based projection")
    h = hermite_polynomial_values(n_h - 1, np.sqrt(2.0) * nodes)
    return np.sqrt(2.0 * T0) * (f_at_nodes[None, :, :] * (h * reweight)[:, None, :]).sum(axis=2)


def reconstruct_f(coeffs: CoefficientField, v_grid: np.ndarray) -> np.ndarray:
    """f(x_j, v) = sum_k sqrt(rho_inf)_j D_{k,j} Psi_k(v), shape (n_x, len(v_grid))."""
    psi = hermite_function_values(coeffs.n_h - 1, v_grid, coeffs.field.T0)
    c = coeffs.D * coeffs.field.sqrt_rho_inf
    return c.T @ psi
