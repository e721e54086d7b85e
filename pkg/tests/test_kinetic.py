import numpy as np
import pytest

from vfp_hermite import build_uniform_mesh, discretize_equilibrium
from vfp_hermite.diffusion import stationary_state
from vfp_hermite.hermite import CoefficientField, DensityProfile, InitialDataSpec, project_initial
from vfp_hermite.kinetic import (
    GlobalSystem,
    SchemeConfig,
    assemble_global,
    load_checkpoint,
    run,
    save_checkpoint,
    step,
)

from conftest import make_field


def wnorm(mesh, coeffs, ref=None):
    d = coeffs.D if ref is None else coeffs.D - ref.D
    return np.sqrt(np.sum(mesh.dx * d**2))


def test_config_validation():
    with pytest.raises(ValueError):
        SchemeConfig(epsilon=0.0, dt=1e-3, n_h=4)
    with pytest.raises(ValueError):
        SchemeConfig(epsilon=1.0, dt=1e-3, n_h=0)
    with pytest.raises(ValueError):
        SchemeConfig(epsilon=1.0, dt=1e-3, n_h=4, tau_law="power")
    with pytest.raises(ValueError):
        SchemeConfig(epsilon=1.0, dt=1e-3, n_h=4, tau_law="power", beta=2.5)
    with pytest.raises(ValueError):
        SchemeConfig(epsilon=1.0, dt=1e-3, n_h=4, tau_law="fixed")
    with pytest.raises(ValueError):
        SchemeConfig(epsilon=1.0, dt=1e-3, n_h=4, closure="pade")
    # tau_bar0 must dominate tau(eps) / eps
    with pytest.raises(ValueError):
        SchemeConfig(epsilon=1.0, dt=1e-3, n_h=4, tau0=5.0, tau_bar0=1.0)


def test_tau_laws():
    quad = SchemeConfig(epsilon=0.1, dt=1e-3, n_h=2, tau_law="quadratic", tau0=5.0)
    assert quad.tau() == pytest.approx(0.05)
    power = SchemeConfig(epsilon=0.1, dt=1e-3, n_h=2, tau_law="power", beta=1.5)
    assert power.tau() == pytest.approx(0.1**1.5)
    fixed = SchemeConfig(epsilon=0.1, dt=1e-3, n_h=2, tau_law="fixed", tau_c=0.3)
    assert fixed.tau() == pytest.approx(0.3)
    assert quad.tau_bar0 == pytest.approx(0.5)


def test_single_mode_system_is_identity(mesh64, field64):
    config = SchemeConfig(epsilon=1.0, dt=1e-3, n_h=1)
    system = assemble_global(field64, mesh64, config)
    dense = system.matrix.toarray()
    assert np.array_equal(dense, np.eye(64))
    rng = np.random.default_rng(0)
    d = CoefficientField(D=rng.standard_normal((1, 64)), field=field64)
    assert np.array_equal(step(system, d).D, d.D)


def test_equilibrium_is_fixed_point(mesh64, field64):
    config = SchemeConfig(epsilon=1e-3, dt=1e-3, n_h=12, tau0=5.0)
    system = assemble_global(field64, mesh64, config)
    d_inf = stationary_state(field64, n_h=12)
    out = step(system, d_inf)
    assert wnorm(mesh64, out, d_inf) <= 1e-12 * wnorm(mesh64, d_inf)
    # the generator itself annihilates the equilibrium
    flat = system.generator @ d_inf.D.reshape(-1)
    assert np.abs(flat).max() <= 1e-10


def test_homogeneous_modes_decay_exactly(flat4):
    mesh, field = flat4
    config = SchemeConfig(epsilon=0.7, dt=1e-3, n_h=6, tau0=2.0)
    system = assemble_global(field, mesh, config)
    d0 = CoefficientField(D=np.ones((6, 4)), field=field)
    tau = config.tau()
    coeffs = d0
    n_steps = 100
    for _ in range(n_steps):
        coeffs = step(system, coeffs)
    ks = np.arange(6)
    expected = (1.0 + ks * config.dt / tau) ** (-n_steps)
    assert np.abs(coeffs.D - expected[:, None]).max() <= 1e-12


def test_mass_conservation(mesh64, field64):
    spec = InitialDataSpec(kind="maxwellian_shifted", density=DensityProfile(delta=0.5), u0=1.0)
    coeffs = project_initial(spec, field64, mesh64, 16)
    config = SchemeConfig(epsilon=0.1, dt=1e-3, n_h=16, tau0=5.0)
    system = assemble_global(field64, mesh64, config)
    mass0 = coeffs.weighted_mass(mesh64)
    for _ in range(200):
        coeffs = step(system, coeffs)
    assert abs(coeffs.weighted_mass(mesh64) - mass0) <= 1e-12 * abs(mass0)


def test_unconditional_contraction(mesh64, field64):
    rng = np.random.default_rng(23)
    d_inf = stationary_state(field64, n_h=8)
    for eps, dt in [(1.0, 1e-2), (1e-2, 1.0), (0.3, 0.1)]:
        config = SchemeConfig(epsilon=eps, dt=dt, n_h=8, tau0=5.0, tau_bar0=5.0)
        system = assemble_global(field64, mesh64, config)
        for _ in range(5):
            coeffs = CoefficientField(D=rng.standard_normal((8, 64)), field=field64)
            before = wnorm(mesh64, coeffs, d_inf)
            after = wnorm(mesh64, step(system, coeffs), d_inf)
            assert after <= before * (1 + 1e-12)


def test_run_zero_steps_returns_input(mesh64, field64):
    config = SchemeConfig(epsilon=1.0, dt=1e-3, n_h=4)
    d0 = stationary_state(field64, n_h=4)
    out = run(field64, mesh64, config, d0, n_steps=0, diag_every=0)
    assert np.array_equal(out.D, d0.D)


def test_run_emits_records(mesh64, field64):
    config = SchemeConfig(epsilon=1.0, dt=1e-3, n_h=4)
    d0 = stationary_state(field64, n_h=4)

    class Sink:
        def __init__(self):
            self.items = []

        def emit(self, item):
            self.items.append(item)

    sink = Sink()
    run(
        field64,
        mesh64,
        config,
        d0,
        n_steps=10,
        diag_every=4,
        sink=sink,
        recorder=lambda n, t, c: (n, t),
    )
    assert [item[0] for item in sink.items] == [0, 4, 8, 10]


def test_steady_state_preserved_over_long_run(mesh64, field64):
    config = SchemeConfig(epsilon=1.0, dt=1e-3, n_h=10, tau0=5.0)
    d_inf = stationary_state(field64, n_h=10)
    worst = []
    run(
        field64,
        mesh64,
        config,
        d_inf,
        n_steps=1000,
        diag_every=50,
        sink=type("S", (), {"emit": staticmethod(lambda rec: worst.append(rec))})(),
        recorder=lambda n, t, c: wnorm(mesh64, c, d_inf),
    )
    assert max(worst) <= 1e-11 * wnorm(mesh64, d_inf)


def test_checkpoint_round_trip(tmp_path, mesh64, field64):
    rng = np.random.default_rng(31)
    coeffs = CoefficientField(D=rng.standard_normal((5, 64)), field=field64)
    path = tmp_path / "state.ckpt"
    save_checkpoint(path, coeffs)
    loaded = load_checkpoint(path, field64)
    assert np.array_equal(loaded.D, coeffs.D)
    raw = path.read_bytes()
    assert raw[:4] == b"VFPD"
    assert len(raw) == 16 + 8 * 5 * 64


def test_checkpoint_rejects_corrupt_files(tmp_path, field64):
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"nope")
    with pytest.raises(ValueError):
        load_checkpoint(path, field64)
    path.write_bytes(b"VFPD" + b"\x02\x00\x00\x00" + b"\x01\x00\x00\x00" * 2)
    with pytest.raises(ValueError):
        load_checkpoint(path, field64)


def test_iterative_solver_path(mesh64, field64, monkeypatch):
    import vfp_hermite.kinetic as kin

    monkeypatch.setattr(kin, "DIRECT_SOLVE_LIMIT", 10)
    config = SchemeConfig(epsilon=0.5, dt=1e-3, n_h=6, tau0=5.0, linear_tol=1e-13)
    system = kin.assemble_global(field64, mesh64, config)
    d_inf = stationary_state(field64, n_h=6)
    rng = np.random.default_rng(4)
    coeffs = CoefficientField(D=d_inf.D + 0.1 * rng.standard_normal((6, 64)), field=field64)
    out = kin.step(system, coeffs)
    residual = system.matrix @ out.D.reshape(-1) - coeffs.D.reshape(-1)
    assert np.linalg.norm(residual) <= 1e-10 * np.linalg.norm(coeffs.D)
