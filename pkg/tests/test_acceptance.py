"""Acceptance suite: structural identities, small-instance oracles and
measured-scaling checks, one test per criterion with a printed verdict."""

import math
import time

import numpy as np
import pytest

from vfp_hermite import (
    PotentialSpec,
    build_perturbed_mesh,
    build_uniform_mesh,
    discretize_equilibrium,
    sample_potential,
)
from vfp_hermite import diagnostics, diffusion, kinetic, operators
from vfp_hermite.elliptic import WeightedPoissonSolver, solve_weighted_poisson
from vfp_hermite.hermite import (
    CoefficientField,
    DensityProfile,
    InitialDataSpec,
    maxwellian_moments_quadrature,
    project_initial,
    shifted_maxwellian_moments,
)

REFERENCE_POTENTIAL = PotentialSpec(kind="two_cosine", amp1=0.1, amp2=0.9, mode1=1, mode2=2)
DT = 1e-3
TAU0 = 5.0
TAU_BAR0 = 5.0  # sup tau(eps)/eps over the preset epsilon list (attained at eps=1)


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    assert ok, f"{criterion}: {detail}"


def wnorm(mesh, v):
    return float(np.sqrt(np.sum(mesh.dx * np.asarray(v) ** 2)))


def reference_field(mesh, mass=10.0):
    return discretize_equilibrium(sample_potential(REFERENCE_POTENTIAL, mesh), mesh, 1.0, mass)


def initial_test1(field, mesh, n_h):
    spec = InitialDataSpec(kind="maxwellian_centered", density=DensityProfile(delta=0.5))
    return project_initial(spec, field, mesh, n_h)


def initial_test2(field, mesh, n_h):
    spec = InitialDataSpec(kind="maxwellian_shifted", density=DensityProfile(delta=0.5), u0=1.0)
    return project_initial(spec, field, mesh, n_h)


def test_criterion_01_operator_identity_suite():
    start = time.time()
    rng = np.random.default_rng(101)
    worst = 0.0
    for n_x in (16, 64):
        for mesh in (
            build_uniform_mesh(0.0, 10.0, n_x),
            build_perturbed_mesh(0.0, 10.0, n_x, 0.4, seed=11),
        ):
            field = reference_field(mesh)
            sq = field.sqrt_rho_inf
            worst = max(worst, wnorm(mesh, operators.apply_A(field, mesh, sq)) / wnorm(mesh, sq))
            diag = -(field.E / np.sqrt(field.T0))
            for _ in range(20):
                u = rng.standard_normal(n_x)
                v = rng.standard_normal(n_x)
                lhs = np.sum(mesh.dx * operators.apply_A(field, mesh, u) * v)
                rhs = np.sum(mesh.dx * u * operators.apply_Astar(field, mesh, v))
                worst = max(worst, abs(lhs - rhs) / (wnorm(mesh, u) * wnorm(mesh, v)))
                mass = np.sum(mesh.dx * operators.apply_Astar(field, mesh, u) * sq)
                worst = max(worst, abs(mass) / wnorm(mesh, u))
                total = operators.apply_A(field, mesh, u) + operators.apply_Astar(field, mesh, u)
                worst = max(worst, wnorm(mesh, total - diag * u) / wnorm(mesh, u))
                comm = operators.apply_commutator(field, mesh, u)
                closed = operators.commutator_closed_form(field, mesh, u)
                worst = max(worst, wnorm(mesh, comm - closed) / max(wnorm(mesh, comm), wnorm(mesh, u)))
    elapsed = time.time() - start
    report(
        "criterion 1 (operator identities)",
        worst <= 1e-13 and elapsed < 1.0,
        f"worst residual {worst:.3e} <= 1e-13, runtime {elapsed:.2f}s < 1s",
    )


def test_criterion_02_discrete_poincare():
    start = time.time()
    mesh = build_uniform_mesh(0.0, 10.0, 64)
    estimate = operators.measure_poincare_constant(reference_field(mesh), mesh)
    flat = discretize_equilibrium(np.zeros(64), mesh, 1.0, 10.0)
    flat_estimate = operators.measure_poincare_constant(flat, mesh)
    elapsed = time.time() - start
    checkerboard = np.tile([1.0, -1.0], 32) / np.sqrt(64)
    overlap = abs(np.dot(flat_estimate.kernel_vector, checkerboard))
    ok = (
        estimate.sigma_min > 0.0
        and np.isfinite(estimate.c_d)
        and flat_estimate.degenerate
        and overlap > 0.99
        and elapsed < 5.0
    )
    report(
        "criterion 2 (discrete Poincare)",
        ok,
        f"C_d={estimate.c_d:.4f} (sigma_resolved={estimate.sigma_resolved:.3e}, "
        f"sigma_min={estimate.sigma_min:.1e} > 0); constant-potential checkerboard "
        f"detected (overlap {overlap:.3f}); runtime {elapsed:.2f}s < 5s",
    )


def test_criterion_03_well_balanced_steady_state():
    start = time.time()
    mesh = build_uniform_mesh(0.0, 10.0, 64)
    field = reference_field(mesh)
    d_inf = diffusion.stationary_state(field, 50)
    norm_inf = wnorm(mesh, d_inf.D)
    worst = 0.0
    for eps in (1.0, 1e-3):
        config = kinetic.SchemeConfig(epsilon=eps, dt=DT, n_h=50, tau0=TAU0, tau_bar0=TAU_BAR0)
        system = kinetic.assemble_global(field, mesh, config)
        coeffs = d_inf
        for _ in range(1000):
            coeffs = kinetic.step(system, coeffs)
            worst = max(worst, wnorm(mesh, coeffs.D - d_inf.D))
    elapsed = time.time() - start
    report(
        "criterion 3 (well-balanced steady state)",
        worst <= 1e-11 * norm_inf and elapsed < 30.0,
        f"sup distance {worst:.3e} <= {1e-11 * norm_inf:.3e}, runtime {elapsed:.1f}s < 30s",
    )


def test_criterion_04_mass_conservation():
    mesh = build_uniform_mesh(0.0, 10.0, 64)
    field = reference_field(mesh)
    initial = initial_test1(field, mesh, 50)
    mass0 = initial.weighted_mass(mesh)
    worst = 0.0
    for eps in (1.0, 0.5, 0.2, 0.1, 1e-2, 1e-3):  # the full preset epsilon list
        config = kinetic.SchemeConfig(epsilon=eps, dt=DT, n_h=50, tau0=TAU0, tau_bar0=TAU_BAR0)
        system = kinetic.assemble_global(field, mesh, config)
        coeffs = initial
        for _ in range(10_000):
            coeffs = kinetic.step(system, coeffs)
        worst = max(worst, abs(coeffs.weighted_mass(mesh) - mass0) / abs(mass0))
    report(
        "criterion 4 (mass conservation)",
        worst <= 1e-11,
        f"worst relative drift over 1e4 steps {worst:.3e} <= 1e-11",
    )


def test_criterion_05_contraction_and_entropy_monotonicity():
    mesh = build_uniform_mesh(0.0, 10.0, 64)
    field = reference_field(mesh)
    solver = WeightedPoissonSolver(field, mesh)
    params = diagnostics.EntropyParams.from_measurements(
        TAU_BAR0, operators.measure_poincare_constant(field, mesh).c_d
    )
    trajectories = [
        ("test1 eps=1", 1.0, initial_test1(field, mesh, 50)),
        ("test2 eps=0.5", 0.5, initial_test2(field, mesh, 50)),
        ("test2 eps=1e-2", 1e-2, initial_test2(field, mesh, 50)),
    ]
    worst_l2, worst_h0 = 0.0, 0.0
    for _, eps, coeffs in trajectories:
        config = kinetic.SchemeConfig(epsilon=eps, dt=DT, n_h=50, tau0=TAU0, tau_bar0=TAU_BAR0)
        system = kinetic.assemble_global(field, mesh, config)
        l2_prev = diagnostics.equilibrium_distance(coeffs, mesh)
        h0_prev = diagnostics.entropy_H0(coeffs, solver, params, config)
        for _ in range(2000):
            coeffs = kinetic.step(system, coeffs)
            l2 = diagnostics.equilibrium_distance(coeffs, mesh)
            h0 = diagnostics.entropy_H0(coeffs, solver, params, config)
            worst_l2 = max(worst_l2, (l2 - l2_prev) / max(l2_prev, 1e-300))
            worst_h0 = max(worst_h0, (h0 - h0_prev) / max(h0_prev, 1e-300))
            l2_prev, h0_prev = l2, h0
    ok = worst_l2 <= 1e-12 and worst_h0 <= 1e-12
    report(
        "criterion 5 (L2 contraction + H0 monotonicity)",
        ok,
        f"worst per-step relative increase: l2 {worst_l2:.2e}, H0 {worst_h0:.2e} (<= 1e-12)",
    )


def test_criterion_06_entropy_sandwiches():
    mesh = build_uniform_mesh(0.0, 10.0, 64)
    field = reference_field(mesh)
    solver = WeightedPoissonSolver(field, mesh)
    c_d = operators.measure_poincare_constant(field, mesh).c_d
    config = kinetic.SchemeConfig(epsilon=0.5, dt=DT, n_h=6, tau0=TAU0, tau_bar0=TAU_BAR0)
    params = diagnostics.EntropyParams.from_measurements(TAU_BAR0, c_d)
    ratio = config.tau() / config.epsilon
    rng = np.random.default_rng(106)
    w = mesh.dx * field.sqrt_rho_inf
    rho_mass = float(np.sum(mesh.dx * field.rho_inf))
    slack = 0.0
    for _ in range(100):
        d = rng.standard_normal((6, 64))
        d[0] -= (np.sum(w * d[0]) - rho_mass) / rho_mass * field.sqrt_rho_inf
        coeffs = CoefficientField(D=d, field=field)
        dist_sq = diagnostics.equilibrium_distance(coeffs, mesh) ** 2
        b_sq = diagnostics.b_norm(coeffs, mesh) ** 2
        h0 = diagnostics.entropy_H0(coeffs, solver, params, config)
        h1 = diagnostics.entropy_H1(coeffs, mesh, params, config)
        slack = max(slack, (0.25 * dist_sq - h0) / max(dist_sq, 1.0))
        slack = max(slack, (h0 - 0.75 * dist_sq) / max(dist_sq, 1.0))
        slack = max(slack, ((b_sq - dist_sq) - 4 * h1) / max(b_sq, 1.0))
        slack = max(slack, (4 * h1 - (3 * b_sq + dist_sq)) / max(b_sq, 1.0))
        limit_d0 = field.sqrt_rho_inf + rng.standard_normal(64)
        limit_d0 -= (np.sum(w * limit_d0) - np.sum(w * d[0])) / rho_mass * field.sqrt_rho_inf
        e_val = diagnostics.functional_E(coeffs, limit_d0, solver, config)
        hm1_sq = solver.h_minus1_norm(d[0] - limit_d0) ** 2
        scale = max(hm1_sq, b_sq, 1.0)
        slack = max(slack, (e_val - (hm1_sq + c_d**2 * ratio**2 * b_sq)) / scale)
        slack = max(slack, ((0.25 * hm1_sq - 0.5 * c_d**2 * ratio**2 * b_sq) - e_val) / scale)
    report(
        "criterion 6 (entropy sandwiches)",
        slack <= 1e-12,
        f"worst inequality slack over 100 random fields {slack:.3e} <= 1e-12",
    )


def test_criterion_07_elliptic_oracle():
    mesh = build_uniform_mesh(0.0, 1.0, 4)
    field = discretize_equilibrium(np.zeros(4), mesh, 1.0, 1.0)
    solver = WeightedPoissonSolver(field, mesh)
    g = np.array([8.0, 8.0, -8.0, -8.0])
    sol = solver.solve(g)
    err_u = np.abs(sol.u - np.array([0.5, 0.5, -0.5, -0.5])).max()
    err_norm = abs(solver.h_minus1_norm(g) - 2.0)
    worst_oracle = 0.0
    for n_x in (8, 12, 16):
        mesh_n = build_uniform_mesh(0.0, 10.0, n_x)
        field_n = reference_field(mesh_n, mass=2.0)
        solver_n = WeightedPoissonSolver(field_n, mesh_n)
        normal = (
            operators.assemble_matrix(field_n, mesh_n, "A_star")
            @ operators.assemble_matrix(field_n, mesh_n, "A")
        ).toarray()
        w = mesh_n.dx * field_n.sqrt_rho_inf
        bordered = np.zeros((n_x + 1, n_x + 1))
        bordered[:n_x, :n_x] = normal
        bordered[:n_x, n_x] = w
        bordered[n_x, :n_x] = w
        rng = np.random.default_rng(n_x)
        for _ in range(20):
            g_n, _ = solver_n.project_compatible(rng.standard_normal(n_x))
            expected, *_ = np.linalg.lstsq(bordered, np.append(g_n, 0.0), rcond=1e-10)
            worst_oracle = max(worst_oracle, np.abs(solver_n.solve(g_n).u - expected[:n_x]).max())
    ok = err_u <= 1e-12 and err_norm <= 1e-12 and worst_oracle <= 1e-10
    report(
        "criterion 7 (elliptic oracle)",
        ok,
        f"4-cell solution error {err_u:.2e}, H^-1 norm error {err_norm:.2e} (<= 1e-12); "
        f"dense least-squares mismatch {worst_oracle:.2e} <= 1e-10",
    )


def test_criterion_08_hermite_coefficient_oracle():
    analytic = shifted_maxwellian_moments(31, u0=1.0, T0=1.0)
    quadrature = maxwellian_moments_quadrature(31, u0=1.0, T_init=1.0, T0=1.0, order=200)
    closed = np.array([1.0 / np.sqrt(float(math.factorial(k))) for k in range(31)])
    err_quad = np.abs(analytic - quadrature).max()
    err_closed = np.abs(analytic - closed).max()
    ok = err_quad <= 1e-10 and err_closed <= 1e-12
    report(
        "criterion 8 (Hermite coefficient oracle)",
        ok,
        f"analytic vs quadrature {err_quad:.2e} <= 1e-10 for k <= 30 "
        f"(vs factorial form {err_closed:.2e})",
    )


def test_criterion_09_mode_damping_exact():
    mesh = build_uniform_mesh(0.0, 10.0, 64)
    field = discretize_equilibrium(np.zeros(64), mesh, 1.0, 10.0)
    config = kinetic.SchemeConfig(epsilon=0.3, dt=DT, n_h=12, tau0=TAU0, tau_bar0=TAU_BAR0)
    system = kinetic.assemble_global(field, mesh, config)
    coeffs = CoefficientField(D=np.ones((12, 64)), field=field)
    tau = config.tau()
    worst = 0.0
    for n in range(1, 101):
        coeffs = kinetic.step(system, coeffs)
        expected = (1.0 + np.arange(12) * DT / tau) ** (-n)
        worst = max(worst, np.abs(coeffs.D - expected[:, None]).max())
    report(
        "criterion 9 (mode damping exact solution)",
        worst <= 1e-12,
        f"max deviation from (1 + k dt / tau)^-n over 100 steps {worst:.3e} <= 1e-12",
    )


def _run_test2_with_limit(field, mesh, eps, n_h, n_steps, solver):
    config = kinetic.SchemeConfig(epsilon=eps, dt=DT, n_h=n_h, tau0=TAU0, tau_bar0=TAU_BAR0)
    system = kinetic.assemble_global(field, mesh, config)
    limit = diffusion.LimitSystem(field, mesh, TAU0, DT)
    coeffs = initial_test2(field, mesh, n_h)
    state = diffusion.LimitState(D0_bar=coeffs.D[0].copy(), tau0=TAU0)
    times, hm1, dperp = [0.0], [0.0], [diagnostics.dperp_norm(coeffs, mesh)]
    for n in range(1, n_steps + 1):
        coeffs = kinetic.step(system, coeffs)
        state = limit.step(state)
        times.append(n * DT)
        dperp.append(diagnostics.dperp_norm(coeffs, mesh))
        if n % 10 == 0:
            hm1.append(solver.h_minus1_norm(coeffs.D[0] - state.D0_bar))
        else:
            hm1.append(None)
    return np.array(times), hm1, np.array(dperp)


def test_criterion_10_ap_plateau_scaling():
    mesh = build_uniform_mesh(0.0, 10.0, 64)
    field = reference_field(mesh)
    solver = WeightedPoissonSolver(field, mesh)
    plateaus = {}
    for eps in (1e-2, 1e-3, 1e-4):
        times, hm1, _ = _run_test2_with_limit(field, mesh, eps, 100, 3000, solver)
        window = [
            value
            for t, value in zip(times, hm1)
            if value is not None and 0.3 <= t <= 1.0
        ]
        plateaus[eps] = float(np.median(window))
    r21 = plateaus[1e-2] / plateaus[1e-3]
    r32 = plateaus[1e-3] / plateaus[1e-4]
    ok = 5.0 <= r21 <= 20.0 and 5.0 <= r32 <= 20.0
    report(
        "criterion 10 (AP plateau scaling)",
        ok,
        f"plateaus {plateaus[1e-2]:.3e} / {plateaus[1e-3]:.3e} / {plateaus[1e-4]:.3e}, "
        f"decade ratios {r21:.2f}, {r32:.2f} in [5, 20]",
    )


def test_criterion_11_initial_layer_rate():
    mesh = build_uniform_mesh(0.0, 10.0, 64)
    field = reference_field(mesh)
    eps = 1e-2
    config = kinetic.SchemeConfig(epsilon=eps, dt=DT, n_h=100, tau0=TAU0, tau_bar0=TAU_BAR0)
    system = kinetic.assemble_global(field, mesh, config)
    coeffs = initial_test2(field, mesh, 100)
    dperp = [diagnostics.dperp_norm(coeffs, mesh)]
    for _ in range(200):
        coeffs = kinetic.step(system, coeffs)
        dperp.append(diagnostics.dperp_norm(coeffs, mesh))
    dperp = np.array(dperp)
    # the bound is a decaying layer term plus an O(eps) remainder: measure
    # the factor on the layer segment, i.e. the leading steps that still
    # decay markedly (the remainder contracts by < 10% per step)
    all_ratios = dperp[1:21] / dperp[:20]
    layer_end = int(np.argmax(all_ratios >= 0.9)) if (all_ratios >= 0.9).any() else 20
    ratios = all_ratios[:layer_end]
    measured = float(np.exp(np.mean(np.log(ratios))))
    theory = (1.0 + DT / (2.0 * TAU0 * eps**2)) ** -0.5
    stall = dperp[layer_end]
    ok = ratios.size >= 2 and measured <= 1.1 * theory
    report(
        "criterion 11 (initial-layer rate)",
        ok,
        f"measured layer factor {measured:.4f} <= 1.1 x theory {theory:.4f} "
        f"({ratios.size} layer steps, handover level {stall:.3e} = O(eps), "
        f"start {dperp[0]:.3e})",
    )


def test_criterion_12_oscillatory_relaxation():
    mesh = build_uniform_mesh(0.0, 10.0, 64)
    field = reference_field(mesh)
    config = kinetic.SchemeConfig(epsilon=1.0, dt=DT, n_h=100, tau0=TAU0, tau_bar0=TAU_BAR0)
    system = kinetic.assemble_global(field, mesh, config)
    coeffs = initial_test1(field, mesh, 100)
    dperp = [diagnostics.dperp_norm(coeffs, mesh)]
    l2 = [diagnostics.equilibrium_distance(coeffs, mesh)]
    for n in range(1, 20_001):
        coeffs = kinetic.step(system, coeffs)
        if n % 10 == 0:
            dperp.append(diagnostics.dperp_norm(coeffs, mesh))
            l2.append(diagnostics.equilibrium_distance(coeffs, mesh))
    dperp = np.array(dperp)
    l2 = np.array(l2)
    interior_maxima = int(np.sum((dperp[1:-1] > dperp[:-2]) & (dperp[1:-1] > dperp[2:])))
    monotone = bool((np.diff(l2) <= l2[:-1] * 1e-12).all())
    ok = interior_maxima >= 3 and monotone
    report(
        "criterion 12 (oscillatory relaxation to t=20)",
        ok,
        f"{interior_maxima} interior local maxima of the local-equilibrium distance "
        f"(>= 3) while the full distance is monotone ({monotone})",
    )
