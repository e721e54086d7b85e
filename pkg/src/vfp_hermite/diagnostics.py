"""Norms, modified entropies and decay-rate fitting.

Everything is measured in the dx-weighted L2 norm with no density weight.
The modified entropies add a cross term to the plain squared distance so
that the undamped zeroth mode picks up dissipation; their coefficients
default to the largest values for which the equivalence sandwiches and
the step-remainder positivity are guaranteed, built from the configured
tau bound and the measured Poincare constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import operators
from .elliptic import WeightedPoissonSolver
from .hermite import CoefficientField
from .kinetic import SchemeConfig
from .mesh import Mesh


@dataclass(frozen=True)
class EntropyParams:
    """Cross-term coefficients for the modified entropies (both positive)."""

    alpha0: float
    alpha1: float

    def __post_init__(self):
        if self.alpha0 <= 0 or self.alpha1 <= 0:
            raise ValueError("entropy coefficients must be positive")

    @classmethod
    def from_measurements(cls, tau_bar0: float, c_d: float) -> "EntropyParams":
        alpha0 = min(1.0 / (4.0 * tau_bar0 * c_d), 1.0 / (tau_bar0 * (1.0 + c_d**2)))
        alpha1 = min(
            1.0 / (2.0 * tau_bar0),
            1.0 / (2.0 + 3.0 * tau_bar0**2),
            1.0 / (tau_bar0 * (1.0 + c_d**2)),
        )
        return cls(alpha0=alpha0, alpha1=alpha1)


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-step diagnostics; optional entries are None when not computed."""

    step: int
    t: float
    l2_dist: float
    rho_dist: float
    dperp: float
    d1_norm: float
    b_norm: float
    mass: float
    hminus1_macro: float | None = None
    H0: float | None = None
    H1: float | None = None
    Efun: float | None = None
    alpha0: float | None = None
    alpha1: float | None = None


def weighted_l2(mesh: Mesh, values: np.ndarray, reference: np.ndarray | None = None) -> float:
    """dx-weighted L2 norm of values - reference, summed over all rows."""
    values = np.asarray(values, dtype=float)
    if reference is not None:
        reference = np.asarray(reference, dtype=float)
        if reference.shape != values.shape:
            raise ValueError(f"shape mismatch: {values.shape} vs {reference.shape}")
        values = values - reference
    return float(np.sqrt(np.sum(mesh.dx * values**2)))


def equilibrium_distance(coeffs: CoefficientField, mesh: Mesh) -> float:
    """||D - D_inf||: only mode zero differs from the equilibrium."""
    rho = weighted_l2(mesh, coeffs.D[0], coeffs.field.sqrt_rho_inf)
    rest = float(np.sum(mesh.dx * coeffs.D[1:] ** 2)) if coeffs.n_h > 1 else 0.0
    return math.hypot(rho, math.sqrt(rest))


def dperp_norm(coeffs: CoefficientField, mesh: Mesh) -> float:
    """Norm of the modes k >= 1, the distance to local velocity equilibrium."""
    if coeffs.n_h <= 1:
        return 0.0
    return float(np.sqrt(np.sum(mesh.dx * coeffs.D[1:] ** 2)))


def b_norm(coeffs: CoefficientField, mesh: Mesh) -> float:
    """||B D|| with B = A on mode zero and A* on the others."""
    field = coeffs.field
    total = np.sum(mesh.dx * operators.apply_A(field, mesh, coeffs.D[0]) ** 2)
    if coeffs.n_h > 1:
        total += np.sum(mesh.dx * operators.apply_Astar(field, mesh, coeffs.D[1:]) ** 2)
    return float(np.sqrt(total))


def entropy_H0(
    coeffs: CoefficientField,
    solver: WeightedPoissonSolver,
    params: EntropyParams,
    config: SchemeConfig,
) -> float:
    """0.5 ||D - D_inf||^2 + alpha0 (tau / eps) <A* D_1, u> with u the
    constrained solution for source D_0 - sqrt(rho_inf)."""
    mesh = solver.mesh
    field = coeffs.field
    dist = equilibrium_distance(coeffs, mesh)
    if coeffs.n_h <= 1:
        return 0.5 * dist**2
    u = solver.solve(coeffs.D[0] - field.sqrt_rho_inf).u
    cross = float(np.sum(mesh.dx * operators.apply_Astar(field, mesh, coeffs.D[1]) * u))
    return 0.5 * dist**2 + params.alpha0 * (config.tau() / config.epsilon) * cross


def entropy_H1(
    coeffs: CoefficientField,
    mesh: Mesh,
    params: EntropyParams,
    config: SchemeConfig,
) -> float:
    """0.5 ||B D||^2 + alpha1 (tau / eps) <A D_0, D_1>."""
    field = coeffs.field
    base = 0.5 * b_norm(coeffs, mesh) ** 2
    if coeffs.n_h <= 1:
        return base
    cross = float(np.sum(mesh.dx * operators.apply_A(field, mesh, coeffs.D[0]) * coeffs.D[1]))
    return base + params.alpha1 * (config.tau() / config.epsilon) * cross


def functional_E(
    coeffs: CoefficientField,
    limit_d0: np.ndarray,
    solver: WeightedPoissonSolver,
    config: SchemeConfig,
) -> float:
    """0.5 ||A v||^2 with v the constrained solution for the source
    D_0 + (tau / eps) A* D_1 - limit_d0."""
    mesh = solver.mesh
    field = coeffs.field
    g = coeffs.D[0] - np.asarray(limit_d0, dtype=float)
    if coeffs.n_h > 1:
        g = g + (config.tau() / config.epsilon) * operators.apply_Astar(field, mesh, coeffs.D[1])
    v = solver.solve(g).u
    return 0.5 * float(np.sum(mesh.dx * solver.apply_A(v) ** 2))


@dataclass(frozen=True)
class DecayFit:
    rate: float
    r_squared: float
    n_points: int


def fit_decay_rate(t: np.ndarray, values: np.ndarray, window: slice | None = None) -> DecayFit:
    """Least-squares slope of log(values) against t, negated.

    Nonpositive values truncate the fit window at their first occurrence;
    an empty or single-point window is an error.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if t.shape != values.shape:
        raise ValueError("time and value arrays must have the same shape")
    if window is not None:
        t, values = t[window], values[window]
    bad = np.nonzero(values <= 0.0)[0]
    if bad.size:
        t, values = t[: bad[0]], values[: bad[0]]
    if t.size < 2:
        raise ValueError("need at least two positive samples to fit a rate")
    log_v = np.log(values)
    slope, intercept = np.polyfit(t, log_v, 1)
    fitted = slope * t + intercept
    ss_res = float(np.sum((log_v - fitted) ** 2))
    ss_tot = float(np.sum((log_v - log_v.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return DecayFit(rate=-float(slope), r_squared=r_squared, n_points=t.size)


def build_record(
    step: int,
    t: float,
    coeffs: CoefficientField,
    mesh: Mesh,
    config: SchemeConfig,
    params: EntropyParams | None = None,
    solver: WeightedPoissonSolver | None = None,
    limit_d0: np.ndarray | None = None,
) -> DiagnosticsRecord:
    """Assemble one diagnostics row; entropy and macro entries appear only
    when a solver (and a limit trajectory) are attached."""
    field = coeffs.field
    rho_dist = weighted_l2(mesh, coeffs.D[0], field.sqrt_rho_inf)
    dperp = dperp_norm(coeffs, mesh)
    record = dict(
        step=step,
        t=t,
        l2_dist=math.hypot(rho_dist, dperp),
        rho_dist=rho_dist,
        dperp=dperp,
        d1_norm=weighted_l2(mesh, coeffs.D[1]) if coeffs.n_h > 1 else 0.0,
        b_norm=b_norm(coeffs, mesh),
        mass=coeffs.weighted_mass(mesh),
    )
    if solver is not None and params is not None:
        record["H0"] = entropy_H0(coeffs, solver, params, config)
        record["H1"] = entropy_H1(coeffs, mesh, params, config)
        record["alpha0"] = params.alpha0
        record["alpha1"] = params.alpha1
        if limit_d0 is not None:
            record["hminus1_macro"] = solver.h_minus1_norm(coeffs.D[0] - limit_d0)
            record["Efun"] = functional_E(coeffs, limit_d0, solver, config)
    return DiagnosticsRecord(**record)
