"""Drift-diffusion limit: implicit Euler on the zeroth coefficient.

The limit stepper solves (I + dt tau0 A* A) r^{n+1} = r^n for the scaled
density r = rho / sqrt(rho_inf), reusing the same operator assembly as the
kinetic stepper, and conserves the weighted mass sum_j dx_j r_j
sqrt(rho_inf)_j exactly up to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from . import operators
from .equilibrium import EquilibriumField
from .hermite import CoefficientField
from .mesh import Mesh


@dataclass(frozen=True)
class LimitState:
    """Zeroth coefficient of the limit model at one time level."""

    D0_bar: np.ndarray
    tau0: float


def stationary_state(field: EquilibriumField, n_h: int = 1) -> CoefficientField:
    """Equilibrium coefficients: sqrt(rho_inf) in mode zero, nothing above."""
    d = np.zeros((n_h, field.n_x))
    d[0] = field.sqrt_rho_inf
    return CoefficientField(D=d, field=field)


class LimitSystem:
    """Factor-once stepper for the limit equation on a fixed field and mesh."""

    def __init__(self, field: EquilibriumField, mesh: Mesh, tau0: float, dt: float):
        if tau0 <= 0 or dt <= 0:
            raise ValueError("tau0 and dt must be positive")
        self.field = field
        self.mesh = mesh
        self.tau0 = tau0
        self.dt = dt
        mat_a = operators.assemble_matrix(field, mesh, operators.KIND_A)
        mat_astar = operators.assemble_matrix(field, mesh, operators.KIND_A_STAR)
        normal = (mat_astar @ mat_a).tocsr()
        matrix = (scipy.sparse.identity(mesh.n_x, format="csr") + dt * tau0 * normal).tocsc()
        try:
            self._lu = scipy.sparse.linalg.splu(matrix)
        except RuntimeError as exc:  # pragma: no cover - matrix is I + PSD
            raise RuntimeError(f"limit system factorization failed: {exc}") from exc

    def step(self, state: LimitState) -> LimitState:
        return LimitState(D0_bar=self._lu.solve(state.D0_bar), tau0=self.tau0)


def limit_step(field: EquilibriumField, mesh: Mesh, tau0: float, dt: float, state: LimitState) -> LimitState:
    """One-shot step; build a LimitSystem for repeated stepping."""
    return LimitSystem(field, mesh, tau0, dt).step(state)


@dataclass(frozen=True)
class LimitDecayReport:
    """Measured geometric decay of the limit trajectory toward equilibrium.

    rate is the negated least-squares slope of log distance versus time
    (inf when the trajectory starts at equilibrium); floor is the
    guaranteed rate log(1 + 2 tau0 dt / C_d^2) / (2 dt) from the measured
    Poincare constant.
    """

    rate: float
    floor: float
    distances: np.ndarray


def limit_decay_check(
    field: EquilibriumField,
    mesh: Mesh,
    tau0: float,
    dt: float,
    d0_bar: np.ndarray,
    n_steps: int,
    c_d: float | None = None,
) -> LimitDecayReport:
    """Run the limit stepper and fit the decay rate of the equilibrium distance."""
    from .diagnostics import fit_decay_rate

    system = LimitSystem(field, mesh, tau0, dt)
    state = LimitState(D0_bar=np.asarray(d0_bar, dtype=float), tau0=tau0)
    distances = np.empty(n_steps + 1)
    reference = field.sqrt_rho_inf
    distances[0] = np.sqrt(np.sum(mesh.dx * (state.D0_bar - reference) ** 2))
    for n in range(1, n_steps + 1):
        state = system.step(state)
        distances[n] = np.sqrt(np.sum(mesh.dx * (state.D0_bar - reference) ** 2))
    if c_d is None:
        c_d = operators.measure_poincare_constant(field, mesh).c_d
    floor = np.log1p(2.0 * tau0 * dt / c_d**2) / (2.0 * dt)
    start_scale = np.sqrt(np.sum(mesh.dx * reference**2))
    if distances[0] <= 1e-14 * start_scale:
        return LimitDecayReport(rate=np.inf, floor=floor, distances=distances)
    t = dt * np.arange(n_steps + 1)
    # roundoff floor (frozen unresolved modes): fit only the decaying segment
    significant = distances > max(1e-13 * distances[0], 1e-250)
    cut = int(np.argmin(significant)) if not significant.all() else distances.size
    fit = fit_decay_rate(t[:cut], distances[:cut])
    return LimitDecayReport(rate=fit.rate, floor=floor, distances=distances)
