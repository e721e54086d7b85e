"""Constrained weighted Poisson solves and the discrete H^-1 norm.

For a source g with zero weighted average the problem is

    (A* A) u = g,    sum_j dx_j u_j sqrt(rho_inf)_j = 0,

and the H^-1 norm of g is the weighted L2 norm of A u.  The solver uses a
bordered (single Lagrange multiplier) formulation and caches one dense SVD
pseudo-inverse per (field, mesh); each solve is then a matrix-vector
product, cheap enough to evaluate entropies every step.  Sources are
projected onto the compatible subspace first and the removed component is
reported as the compatibility defect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from . import operators
from .equilibrium import EquilibriumField
from .mesh import Mesh

COMPAT_REL_TOL = 1e-8


class DegenerateOperatorError(RuntimeError):
    """The normal operator has kernel vectors beyond the steady density."""

    def __init__(self, message: str, kernel_vector: np.ndarray):
        super().__init__(message)
        self.kernel_vector = kernel_vector


@dataclass(frozen=True)
class EllipticSolution:
    """Solution record for one constrained solve.

    compat_defect is |sum_j dx_j g_j sqrt(rho_inf)_j|; sources failing the
    zero-weighted-average condition by more than a relative tolerance are
    flagged (the H^-1 norm is only meaningful for compatible sources).
    """

    u: np.ndarray
    residual_norm: float
    compat_defect: float
    multiplier: float
    flagged: bool
    degenerate: bool


class WeightedPoissonSolver:
    """Factor-once solver for the constrained problem on a fixed field and mesh."""

    def __init__(
        self,
        field: EquilibriumField,
        mesh: Mesh,
        tol: float = 1e-12,
        degenerate_tol: float = 1e-10,
    ):
        self.field = field
        self.mesh = mesh
        self.tol = tol
        mat_a = operators.assemble_matrix(field, mesh, operators.KIND_A)
        mat_astar = operators.assemble_matrix(field, mesh, operators.KIND_A_STAR)
        self.normal_matrix: scipy.sparse.csr_matrix = (mat_astar @ mat_a).tocsr()
        self._mat_a = mat_a
        n = mesh.n_x
        self._weights = mesh.dx * field.sqrt_rho_inf
        self._rho_weight_sq = float(np.sum(mesh.dx * field.rho_inf))
        bordered = np.zeros((n + 1, n + 1))
        bordered[:n, :n] = self.normal_matrix.toarray()
        bordered[:n, n] = self._weights
        bordered[n, :n] = self._weights
        u_svd, s_svd, vt_svd = np.linalg.svd(bordered)
        cutoff = degenerate_tol * s_svd[0]
        keep = s_svd > cutoff
        self._pinv = (vt_svd[keep].T / s_svd[keep]) @ u_svd[:, keep].T
        n_dropped = int((~keep).sum())
        self.degenerate = n_dropped > 0
        self.kernel_vector: np.ndarray | None = None
        if self.degenerate:
            # null vectors of the bordered matrix have zero multiplier
            # component; their cell part spans the extra kernel of A*A
            kernel = vt_svd[~keep][0, :n]
            self.kernel_vector = kernel / np.linalg.norm(kernel)

    def _norm(self, v: np.ndarray) -> float:
        return float(np.sqrt(np.sum(self.mesh.dx * v**2)))

    def project_compatible(self, g: np.ndarray) -> tuple[np.ndarray, float]:
        """Remove the weighted mean of g; returns (g_proj, signed defect)."""
        defect = float(np.sum(self._weights * g))
        g_proj = g - (defect / self._rho_weight_sq) * self.field.sqrt_rho_inf
        return g_proj, defect

    def solve(self, g: np.ndarray, strict: bool = False) -> EllipticSolution:
        """Minimum-norm least-squares solution of the bordered system.

        Directions the normal operator cannot resolve (the checkerboard on
        even cell counts) are excluded by the pseudo-inverse cutoff; the
        returned solution is the minimum-norm one, orthogonal to them.
        With strict=True such a system raises DegenerateOperatorError
        instead, naming the extra kernel vector.
        """
        g = np.asarray(g, dtype=float)
        if g.shape != (self.mesh.n_x,):
            raise ValueError(f"source has shape {g.shape}, expected ({self.mesh.n_x},)")
        if self.degenerate and strict:
            raise DegenerateOperatorError(
                "constrained weighted Poisson problem is degenerate: the normal "
                "operator annihilates an extra kernel vector "
                f"(first entries {np.round(self.kernel_vector[:4], 6)}); exact for a "
                "constant potential with an even cell count",
                self.kernel_vector,
            )
        g_proj, defect = self.project_compatible(g)
        rhs = np.append(g_proj, 0.0)
        sol = self._pinv @ rhs
        u, multiplier = sol[:-1], float(sol[-1])
        residual = self._norm(self.normal_matrix @ u - g_proj)
        g_norm = self._norm(g)
        flagged = abs(defect) > COMPAT_REL_TOL * g_norm if g_norm > 0 else False
        return EllipticSolution(
            u=u,
            residual_norm=residual,
            compat_defect=abs(defect),
            multiplier=multiplier,
            flagged=flagged,
            degenerate=self.degenerate,
        )

    def h_minus1_norm(self, g: np.ndarray, strict: bool = False) -> float:
        """Weighted L2 norm of A u for the constrained solution u."""
        solution = self.solve(g, strict=strict)
        return self._norm(self._mat_a @ solution.u)

    def apply_A(self, u: np.ndarray) -> np.ndarray:
        return self._mat_a @ u


def solve_weighted_poisson(
    field: EquilibriumField,
    mesh: Mesh,
    g: np.ndarray,
    tol: float = 1e-12,
    strict: bool = False,
) -> EllipticSolution:
    """One-shot constrained solve; build a WeightedPoissonSolver for repeated use."""
    return WeightedPoissonSolver(field, mesh, tol=tol).solve(g, strict=strict)


def h_minus1_norm(
    field: EquilibriumField, mesh: Mesh, g: np.ndarray, strict: bool = False
) -> float:
    return WeightedPoissonSolver(field, mesh).h_minus1_norm(g, strict=strict)
