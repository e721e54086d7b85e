import numpy as np
import pytest

from vfp_hermite import build_perturbed_mesh, build_uniform_mesh, discretize_equilibrium
from vfp_hermite import operators
from vfp_hermite.elliptic import (
    DegenerateOperatorError,
    WeightedPoissonSolver,
    h_minus1_norm,
    solve_weighted_poisson,
)

from conftest import make_field


def wnorm(mesh, v):
    return np.sqrt(np.sum(mesh.dx * v**2))


def dense_lstsq_oracle(field, mesh, g):
    """Independent minimum-norm solve of the bordered system."""
    n = mesh.n_x
    normal = (
        operators.assemble_matrix(field, mesh, "A_star") @ operators.assemble_matrix(field, mesh, "A")
    ).toarray()
    w = mesh.dx * field.sqrt_rho_inf
    bordered = np.zeros((n + 1, n + 1))
    bordered[:n, :n] = normal
    bordered[:n, n] = w
    bordered[n, :n] = w
    defect = float(np.sum(w * g))
    g_proj = g - defect / float(np.sum(mesh.dx * field.rho_inf)) * field.sqrt_rho_inf
    rhs = np.append(g_proj, 0.0)
    solution, *_ = np.linalg.lstsq(bordered, rhs, rcond=1e-10)
    return solution[:n]


def test_zero_source(flat4):
    mesh, field = flat4
    sol = solve_weighted_poisson(field, mesh, np.zeros(4))
    assert np.abs(sol.u).max() <= 1e-14
    assert sol.compat_defect == 0.0


def test_four_cell_flat_example(flat4):
    mesh, field = flat4
    g = np.array([8.0, 8.0, -8.0, -8.0])
    sol = solve_weighted_poisson(field, mesh, g)
    assert np.abs(sol.u - np.array([0.5, 0.5, -0.5, -0.5])).max() <= 1e-12
    assert sol.residual_norm <= 1e-12
    assert h_minus1_norm(field, mesh, g) == pytest.approx(2.0, abs=1e-12)


def test_four_cell_flat_is_degenerate_and_strict_raises(flat4):
    mesh, field = flat4
    solver = WeightedPoissonSolver(field, mesh)
    assert solver.degenerate
    checkerboard = np.array([1.0, -1.0, 1.0, -1.0]) / 2.0
    assert abs(np.dot(solver.kernel_vector, checkerboard)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DegenerateOperatorError) as excinfo:
        solver.solve(np.array([8.0, 8.0, -8.0, -8.0]), strict=True)
    assert excinfo.value.kernel_vector is not None


def test_incompatible_source_flagged(flat4):
    mesh, field = flat4
    sol = solve_weighted_poisson(field, mesh, field.sqrt_rho_inf)
    assert sol.compat_defect == pytest.approx(field.total_mass, abs=1e-14)
    assert sol.flagged


@pytest.mark.parametrize("n_x", [8, 12, 16])
def test_matches_dense_oracle_random_sources(n_x):
    mesh = build_uniform_mesh(0.0, 10.0, n_x)
    field = make_field(mesh, mass=2.0)
    solver = WeightedPoissonSolver(field, mesh)
    rng = np.random.default_rng(n_x)
    for _ in range(20):
        g = rng.standard_normal(n_x)
        g, _ = solver.project_compatible(g)
        expected = dense_lstsq_oracle(field, mesh, g)
        got = solver.solve(g).u
        assert np.abs(got - expected).max() <= 1e-10


def test_matches_dense_oracle_perturbed_mesh():
    mesh = build_perturbed_mesh(0.0, 10.0, 16, 0.3, seed=5)
    field = make_field(mesh, mass=2.0)
    solver = WeightedPoissonSolver(field, mesh)
    rng = np.random.default_rng(77)
    g = rng.standard_normal(16)
    g, _ = solver.project_compatible(g)
    assert np.abs(solver.solve(g).u - dense_lstsq_oracle(field, mesh, g)).max() <= 1e-10


def test_constraint_and_residual(mesh64, field64):
    solver = WeightedPoissonSolver(field64, mesh64)
    rng = np.random.default_rng(3)
    # smooth compatible source: fully resolved, residual at solver tolerance
    g = np.cos(2 * np.pi * mesh64.x_center / 10.0) * field64.sqrt_rho_inf
    g, _ = solver.project_compatible(g)
    sol = solver.solve(g)
    weighted_mean = np.sum(mesh64.dx * sol.u * field64.sqrt_rho_inf)
    assert abs(weighted_mean) <= 1e-11 * wnorm(mesh64, sol.u)
    assert sol.residual_norm <= 1e-11 * wnorm(mesh64, g)


def test_hminus1_zero_for_zero_source(mesh64, field64):
    assert WeightedPoissonSolver(field64, mesh64).h_minus1_norm(np.zeros(64)) == 0.0


def test_first_poincare_estimate_on_random_compatible_sources(mesh64, field64):
    solver = WeightedPoissonSolver(field64, mesh64)
    c_d = operators.measure_poincare_constant(field64, mesh64).c_d
    rng = np.random.default_rng(14)
    for _ in range(100):
        g = rng.standard_normal(64)
        g, _ = solver.project_compatible(g)
        assert solver.h_minus1_norm(g) <= c_d * wnorm(mesh64, g) * (1 + 1e-10)


def test_second_estimate_on_random_compatible_sources(mesh64, field64):
    solver = WeightedPoissonSolver(field64, mesh64)
    c_d = operators.measure_poincare_constant(field64, mesh64).c_d
    m1 = np.abs(field64.E).max()
    bound = 1.0 + c_d * m1 / np.sqrt(field64.T0)
    rng = np.random.default_rng(15)
    for _ in range(100):
        g = rng.standard_normal(64)
        g, _ = solver.project_compatible(g)
        u = solver.solve(g).u
        a2u = operators.apply_A(field64, mesh64, operators.apply_A(field64, mesh64, u))
        assert wnorm(mesh64, a2u) <= bound * wnorm(mesh64, g) * (1 + 1e-10)


def test_solution_map_is_linear(mesh64, field64):
    solver = WeightedPoissonSolver(field64, mesh64)
    rng = np.random.default_rng(16)
    g1, _ = solver.project_compatible(rng.standard_normal(64))
    g2, _ = solver.project_compatible(rng.standard_normal(64))
    u1 = solver.solve(g1).u
    u2 = solver.solve(g2).u
    u12 = solver.solve(2.0 * g1 - 3.0 * g2).u
    assert np.abs(u12 - (2.0 * u1 - 3.0 * u2)).max() <= 1e-11 * max(np.abs(u12).max(), 1.0)


def test_shape_validation(mesh64, field64):
    with pytest.raises(ValueError):
        WeightedPoissonSolver(field64, mesh64).solve(np.zeros(32))
