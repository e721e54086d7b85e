"""Discrete transport operators on the periodic mesh.

For u = (u_j) the two three-point stencils are

    (A  u)_j = +sqrt(T0) * ((u_{j+1} - u_{j-1}) / (2 dx_j) - E_j / (2 T0) * u_j)
    (A* u)_j = -sqrt(T0) * ((u_{j+1} - u_{j-1}) / (2 dx_j) + E_j / (2 T0) * u_j)

with periodic indices.  A* is the exact adjoint of A for the dx-weighted
inner product, sqrt(rho_inf) spans the kernel of A when the field uses the
sqrt-density form, and sum_j dx_j (A* u)_j sqrt(rho_inf)_j vanishes, which
is what makes the kinetic stepper conservative and well-balanced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .equilibrium import EquilibriumField
from .mesh import Mesh

KIND_A = "A"
KIND_A_STAR = "A_star"


def apply_A(field: EquilibriumField, mesh: Mesh, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u)
    du = (np.roll(u, -1, axis=-1) - np.roll(u, 1, axis=-1)) / (2.0 * mesh.dx)
    return np.sqrt(field.T0) * (du - (field.E / (2.0 * field.T0)) * u)


def apply_Astar(field: EquilibriumField, mesh: Mesh, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u)
    du = (np.roll(u, -1, axis=-1) - np.roll(u, 1, axis=-1)) / (2.0 * mesh.dx)
    return -np.sqrt(field.T0) * (du + (field.E / (2.0 * field.T0)) * u)


def apply_B(field: EquilibriumField, mesh: Mesh, k: int, u: np.ndarray) -> np.ndarray:
    """Mode-indexed operator family: A for the zeroth mode, A* for all others."""
    if k < 0:
        raise ValueError(f"mode index must be nonnegative, got {k}")
    return apply_A(field, mesh, u) if k == 0 else apply_Astar(field, mesh, u)


def apply_commutator(field: EquilibriumField, mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """[A, A*] u = A(A* u) - A*(A u), evaluated by composition."""
    return apply_A(field, mesh, apply_Astar(field, mesh, u)) - apply_Astar(
        field, mesh, apply_A(field, mesh, u)
    )


def commutator_closed_form(field: EquilibriumField, mesh: Mesh, u: np.ndarray) -> np.ndarray:
    """Closed form of [A, A*] u; the second differences of u cancel exactly,
    leaving only differences of the field."""
    u = np.asarray(u)
    e_plus = np.roll(field.E, -1)
    e_minus = np.roll(field.E, 1)
    u_plus = np.roll(u, -1, axis=-1)
    u_minus = np.roll(u, 1, axis=-1)
    four_dx = 4.0 * mesh.dx
    return -(e_plus - e_minus) / four_dx * (u_plus + u_minus) - (
        e_plus - 2.0 * field.E + e_minus
    ) / four_dx * (u_plus - u_minus)


def commutator_norm_bound(field: EquilibriumField, mesh: Mesh) -> float:
    """(2 + R_h) * M2 with M2 the largest scaled field difference; an upper
    bound for the weighted operator norm of [A, A*]."""
    e_plus = np.roll(field.E, -1)
    e_minus = np.roll(field.E, 1)
    m2 = max(
        float(np.abs((e_plus - e_minus) / (2.0 * mesh.dx)).max()),
        float(np.abs((e_plus - 2.0 * field.E + e_minus) / (2.0 * mesh.dx)).max()),
    )
    return (2.0 + mesh.r_h) * m2


def assemble_matrix(field: EquilibriumField, mesh: Mesh, kind: str) -> scipy.sparse.csr_matrix:
    """Sparse matrix of A or A*, three nonzeros per row (periodic stencil)."""
    n = mesh.n_x
    sqrt_t0 = np.sqrt(field.T0)
    inv_2dx = sqrt_t0 / (2.0 * mesh.dx)
    diag = sqrt_t0 * field.E / (2.0 * field.T0)
    rows = np.repeat(np.arange(n), 3)
    cols = np.stack([(np.arange(n) + 1) % n, (np.arange(n) - 1) % n, np.arange(n)], axis=1).ravel()
    if kind == KIND_A:
        vals = np.stack([inv_2dx, -inv_2dx, -diag], axis=1).ravel()
    elif kind == KIND_A_STAR:
        vals = np.stack([-inv_2dx, inv_2dx, -diag], axis=1).ravel()
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


@dataclass(frozen=True)
class DiscreteOperator:
    """Immutable view of A or A* bound to a field and mesh."""

    kind: str
    field: EquilibriumField
    mesh: Mesh

    def __post_init__(self):
        if self.kind not in (KIND_A, KIND_A_STAR):
            raise ValueError(f"unknown operator kind {self.kind!r}")

    def apply(self, u: np.ndarray) -> np.ndarray:
        if self.kind == KIND_A:
            return apply_A(self.field, self.mesh, u)
        return apply_Astar(self.field, self.mesh, u)

    def matrix(self) -> scipy.sparse.csr_matrix:
        return assemble_matrix(self.field, self.mesh, self.kind)


@dataclass(frozen=True)
class PoincareEstimate:
    """Measured discrete Poincare constant on the weighted-mean-zero subspace.

    sigma_min is the smallest singular value of A restricted to
    {u : sum_j dx_j u_j sqrt(rho_inf)_j = 0}, both norms dx-weighted.

    The centered stencil leaves a checkerboard direction nearly (constant
    potential: exactly) invisible whenever the cell count is even, so the
    restricted operator can have singular values at roundoff level that do
    not correspond to resolved dynamics.  Those directions are counted in
    kernel_dim and excluded from the reported constant: c_d is the inverse
    of the smallest RESOLVED singular value, and degenerate flags that at
    least one direction was excluded.  Consumers of the elliptic problem
    only ever see the solution through A u, which the excluded directions
    do not touch.
    """

    c_d: float
    sigma_min: float
    sigma_resolved: float
    kernel_dim: int
    degenerate: bool
    kernel_vector: np.ndarray | None


def measure_poincare_constant(
    field: EquilibriumField, mesh: Mesh, degenerate_tol: float = 1e-10
) -> PoincareEstimate:
    """Dense computation of the restricted singular spectrum of A.

    Intended for moderate meshes (a few hundred cells); the weighted norms
    are absorbed by a diagonal similarity so plain SVD machinery applies.
    """
    sqrt_w = np.sqrt(mesh.dx)
    a_dense = assemble_matrix(field, mesh, KIND_A).toarray()
    b = (sqrt_w[:, None] * a_dense) / sqrt_w[None, :]
    q = sqrt_w * field.sqrt_rho_inf
    q = q / np.linalg.norm(q)
    basis = scipy.linalg.null_space(q[None, :])  # (n, n-1), orthonormal
    restricted = b @ basis
    _, svals, vt = scipy.linalg.svd(restricted)
    sigma_min = float(svals[-1])
    sigma_max = float(svals[0])
    cutoff = degenerate_tol * max(sigma_max, 1.0)
    resolved = svals[svals > cutoff]
    kernel_dim = svals.size - resolved.size
    sigma_resolved = float(resolved[-1]) if resolved.size else 0.0
    kernel_vector = None
    if kernel_dim:
        kernel = basis @ vt[-1]
        kernel = kernel / sqrt_w
        kernel_vector = kernel / np.linalg.norm(kernel)
    return PoincareEstimate(
        c_d=1.0 / sigma_resolved if sigma_resolved > 0 else np.inf,
        sigma_min=sigma_min,
        sigma_resolved=sigma_resolved,
        kernel_dim=kernel_dim,
        degenerate=kernel_dim > 0,
        kernel_vector=kernel_vector,
    )
