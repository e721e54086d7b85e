"""Experiment orchestration: configs, presets, runs and sweeps.

A run takes one ExperimentConfig, builds the mesh / steady field / initial
data once, measures the Poincare constant, then advances one kinetic
trajectory per epsilon (optionally in parallel), each with an attached
drift-diffusion trajectory started from the same initial density.  Every
trajectory writes one diagnostics CSV; a manifest ties the outputs to the
exact configuration and the measured constants.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path

import numpy as np

from . import diagnostics, diffusion, kinetic, operators
from .config import (
    ConfigError,
    coerce_bool,
    coerce_float,
    coerce_float_list,
    coerce_int,
    coerce_int_list,
    parse_flat_config,
)
from .elliptic import WeightedPoissonSolver
from .equilibrium import PotentialSpec, discretize_equilibrium, sample_potential
from .hermite import DensityProfile, InitialDataSpec, project_initial
from .io import CsvSink, write_manifest
from .kinetic import SchemeConfig
from .mesh import Mesh, build_perturbed_mesh, build_uniform_mesh


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment."""

    mesh_kind: str = "uniform"
    a: float = 0.0
    b: float = 10.0
    n_x: int = 64
    mesh_amplitude: float = 0.0
    mesh_seed: int = 0

    potential_kind: str = "two_cosine"
    amp1: float = 0.1
    amp2: float = 0.9
    mode1: int = 1
    mode2: int = 2
    potential_values: tuple[float, ...] | None = None

    T0: float = 1.0
    total_mass: float | None = None  # None: use the discrete mass of the initial data
    e_form: str = "sqrt_rho"

    initial_kind: str = "maxwellian_centered"
    delta: float = 0.5
    u0: float = 0.0
    T_init: float | None = None
    density_values: tuple[float, ...] | None = None

    epsilon_list: tuple[float, ...] = (1.0,)
    tau_law: str = "quadratic"
    tau0: float = 5.0
    beta: float | None = None
    tau_c: float | None = None
    dt: float = 1e-3
    n_h: int = 200
    closure: str = "truncate"
    linear_tol: float = 1e-12

    n_steps: int = 20_000
    diag_every: int = 10
    attach_limit: bool = True
    checkpoint_every: int = 0
    checkpoint_steps: tuple[int, ...] = ()
    out: str = "out"

    def __post_init__(self):
        if not self.epsilon_list:
            raise ConfigError("epsilon_list must not be empty")
        if any(eps <= 0 for eps in self.epsilon_list):
            raise ConfigError("all epsilon values must be positive")
        if self.n_steps < 0 or self.diag_every < 0:
            raise ConfigError("n_steps and diag_every must be nonnegative")

    def build_mesh(self) -> Mesh:
        if self.mesh_kind == "uniform":
            return build_uniform_mesh(self.a, self.b, self.n_x)
        if self.mesh_kind == "perturbed":
            return build_perturbed_mesh(self.a, self.b, self.n_x, self.mesh_amplitude, self.mesh_seed)
        raise ConfigError(f"unknown mesh kind {self.mesh_kind!r}")

    def potential_spec(self) -> PotentialSpec:
        values = None if self.potential_values is None else np.asarray(self.potential_values)
        return PotentialSpec(
            kind=self.potential_kind,
            amp1=self.amp1,
            amp2=self.amp2,
            mode1=self.mode1,
            mode2=self.mode2,
            values=values,
        )

    def initial_spec(self) -> InitialDataSpec:
        density = DensityProfile(
            delta=self.delta,
            values=None if self.density_values is None else np.asarray(self.density_values),
        )
        return InitialDataSpec(kind=self.initial_kind, density=density, u0=self.u0, T_init=self.T_init)

    def scheme_for(self, epsilon: float, tau_bar0: float) -> SchemeConfig:
        return SchemeConfig(
            epsilon=epsilon,
            dt=self.dt,
            n_h=self.n_h,
            tau_law=self.tau_law,
            tau0=self.tau0,
            beta=self.beta,
            tau_c=self.tau_c,
            T0=self.T0,
            closure=self.closure,
            linear_tol=self.linear_tol,
            tau_bar0=tau_bar0,
        )

    def tau_bar0(self) -> float:
        probe = SchemeConfig(
            epsilon=1.0,
            dt=self.dt,
            n_h=self.n_h,
            tau_law=self.tau_law,
            tau0=self.tau0,
            beta=self.beta,
            tau_c=self.tau_c,
            T0=self.T0,
        )
        return max(probe.tau(eps) / eps for eps in self.epsilon_list)


# configuration schema: "section.key" -> (attribute, coercion)
_SCHEMA = {
    "mesh.kind": ("mesh_kind", str),
    "mesh.a": ("a", coerce_float),
    "mesh.b": ("b", coerce_float),
    "mesh.n_x": ("n_x", coerce_int),
    "mesh.amplitude": ("mesh_amplitude", coerce_float),
    "mesh.seed": ("mesh_seed", coerce_int),
    "potential.kind": ("potential_kind", str),
    "potential.amp1": ("amp1", coerce_float),
    "potential.amp2": ("amp2", coerce_float),
    "potential.mode1": ("mode1", coerce_int),
    "potential.mode2": ("mode2", coerce_int),
    "potential.values": ("potential_values", coerce_float_list),
    "equilibrium.t0": ("T0", coerce_float),
    "equilibrium.total_mass": ("total_mass", coerce_float),
    "equilibrium.e_form": ("e_form", str),
    "initial.kind": ("initial_kind", str),
    "initial.delta": ("delta", coerce_float),
    "initial.u0": ("u0", coerce_float),
    "initial.t_init": ("T_init", coerce_float),
    "initial.density_values": ("density_values", coerce_float_list),
    "scheme.epsilon_list": ("epsilon_list", coerce_float_list),
    "scheme.tau_law": ("tau_law", str),
    "scheme.tau0": ("tau0", coerce_float),
    "scheme.beta": ("beta", coerce_float),
    "scheme.tau_c": ("tau_c", coerce_float),
    "scheme.dt": ("dt", coerce_float),
    "scheme.n_h": ("n_h", coerce_int),
    "scheme.closure": ("closure", str),
    "scheme.linear_tol": ("linear_tol", coerce_float),
    "run.n_steps": ("n_steps", coerce_int),
    "run.diag_every": ("diag_every", coerce_int),
    "run.attach_limit": ("attach_limit", coerce_bool),
    "run.checkpoint_every": ("checkpoint_every", coerce_int),
    "run.checkpoint_steps": ("checkpoint_steps", coerce_int_list),
    "run.out": ("out", str),
}


def config_from_entries(entries: dict[str, str], base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Apply flat entries on top of a base config, rejecting unknown keys."""
    updates = {}
    for key, raw in entries.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown configuration key {key!r}")
        attribute, coerce = _SCHEMA[key]
        value = coerce(raw, key) if coerce is not str else raw
        if isinstance(value, list):
            value = tuple(value)
        updates[attribute] = value
    base = ExperimentConfig() if base is None else base
    return replace(base, **updates)


def load_config(path: str | Path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    return config_from_entries(parse_flat_config(text, source=str(path)), base=base)


def apply_overrides(config: ExperimentConfig, overrides: list[str]) -> ExperimentConfig:
    """Apply --set section.key=value pairs on top of a config."""
    entries = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        key, _, value = item.partition("=")
        entries[key.strip()] = value.strip()
    return config_from_entries(entries, base=config)


def preset(name: str) -> ExperimentConfig:
    """Built-in experiment presets on the reference two-cosine potential."""
    common = dict(
        epsilon_list=(1.0, 0.5, 0.2, 0.1, 1e-2, 1e-3),
        tau_law="quadratic",
        tau0=5.0,
        dt=1e-3,
        n_h=200,
        n_x=64,
        a=0.0,
        b=10.0,
        delta=0.5,
        diag_every=10,
        attach_limit=True,
    )
    if name == "test1":
        return ExperimentConfig(initial_kind="maxwellian_centered", n_steps=20_000, out="out/test1", **common)
    if name == "test2":
        return ExperimentConfig(
            initial_kind="maxwellian_shifted", u0=1.0, n_steps=30_000, out="out/test2", **common
        )
    raise ConfigError(f"unknown preset {name!r}; available: test1, test2")


@dataclass
class PreparedExperiment:
    """Shared state for all epsilon runs of one experiment."""

    config: ExperimentConfig
    mesh: Mesh
    field: object
    initial: object
    solver: WeightedPoissonSolver | None
    params: diagnostics.EntropyParams | None
    poincare: operators.PoincareEstimate
    tau_bar0: float


def prepare(config: ExperimentConfig) -> PreparedExperiment:
    mesh = config.build_mesh()
    phi = sample_potential(config.potential_spec(), mesh)
    initial_spec = config.initial_spec()
    rho0 = initial_spec.density.sample(mesh) if initial_spec.kind != "coefficients" else None
    if config.total_mass is not None:
        total_mass = config.total_mass
    elif rho0 is not None:
        total_mass = float(np.sum(mesh.dx * rho0))
    else:
        raise ConfigError("total_mass must be given explicitly for coefficient initial data")
    field = discretize_equilibrium(phi, mesh, config.T0, total_mass, e_form=config.e_form)
    initial = project_initial(initial_spec, field, mesh, config.n_h)
    poincare = operators.measure_poincare_constant(field, mesh)
    tau_bar0 = config.tau_bar0()
    solver = WeightedPoissonSolver(field, mesh, tol=config.linear_tol)
    params = diagnostics.EntropyParams.from_measurements(tau_bar0, poincare.c_d)
    return PreparedExperiment(
        config=config,
        mesh=mesh,
        field=field,
        initial=initial,
        solver=solver,
        params=params,
        poincare=poincare,
        tau_bar0=tau_bar0,
    )


def epsilon_label(epsilon: float) -> str:
    return f"eps_{epsilon!r}"


def _checkpoint_plan(config: ExperimentConfig) -> set[int]:
    steps = set(config.checkpoint_steps)
    if config.checkpoint_every > 0:
        steps.update(range(0, config.n_steps + 1, config.checkpoint_every))
    return steps


def run_single_epsilon(
    prep: PreparedExperiment, epsilon: float, out_dir: Path
) -> dict:
    """Advance one epsilon trajectory (with attached limit trajectory) and
    write its diagnostics CSV and checkpoints; returns a manifest entry."""
    config = prep.config
    scheme = config.scheme_for(epsilon, prep.tau_bar0)
    system = kinetic.assemble_global(prep.field, prep.mesh, scheme)
    limit_system = None
    limit_state = None
    if config.attach_limit:
        limit_system = diffusion.LimitSystem(prep.field, prep.mesh, config.tau0, config.dt)
        limit_state = diffusion.LimitState(D0_bar=prep.initial.D[0].copy(), tau0=config.tau0)

    label = epsilon_label(epsilon)
    run_dir = out_dir / label
    run_dir.mkdir(parents=True, exist_ok=True)
    checkpoint_steps = _checkpoint_plan(config)
    checkpoint_paths: dict[str, str] = {}

    def emit(sink: CsvSink, n: int, coeffs) -> None:
        record = diagnostics.build_record(
            n,
            n * config.dt,
            coeffs,
            prep.mesh,
            scheme,
            params=prep.params,
            solver=prep.solver,
            limit_d0=None if limit_state is None else limit_state.D0_bar,
        )
        sink.emit(record)

    def checkpoint(n: int, coeffs) -> None:
        if n in checkpoint_steps:
            path = run_dir / f"step_{n:08d}.ckpt"
            kinetic.save_checkpoint(path, coeffs)
            checkpoint_paths[str(n)] = str(path.relative_to(out_dir))

    coeffs = prep.initial
    csv_path = run_dir / "diagnostics.csv"
    with CsvSink(csv_path) as sink:
        if config.diag_every > 0:
            emit(sink, 0, coeffs)
        checkpoint(0, coeffs)
        for n in range(1, config.n_steps + 1):
            coeffs = kinetic.step(system, coeffs)
            if limit_system is not None:
                limit_state = limit_system.step(limit_state)
            if config.diag_every > 0 and (n % config.diag_every == 0 or n == config.n_steps):
                emit(sink, n, coeffs)
            checkpoint(n, coeffs)

    return {
        "epsilon": epsilon,
        "tau": scheme.tau(),
        "csv": str(csv_path.relative_to(out_dir)),
        "checkpoints": checkpoint_paths,
        "n_steps": config.n_steps,
        "dt": config.dt,
        "status": "ok",
    }


def _manifest_base(prep: PreparedExperiment) -> dict:
    config = prep.config
    field = prep.field
    return {
        "format_version": 1,
        "config": {key: getattr(config, attr) for key, (attr, _) in _SCHEMA.items()},
        "mesh": {
            "a": config.a,
            "b": config.b,
            "n_x": config.n_x,
            "kind": config.mesh_kind,
            "r_h": prep.mesh.r_h,
            "x_center": prep.mesh.x_center.tolist(),
            "dx": prep.mesh.dx.tolist(),
        },
        "equilibrium": {
            "T0": field.T0,
            "c0": field.c0,
            "total_mass": field.total_mass,
            "e_form": field.e_form,
            "phi": field.phi.tolist(),
            "E": field.E.tolist(),
            "sqrt_rho_inf": field.sqrt_rho_inf.tolist(),
        },
        "measured": {
            "c_d": prep.poincare.c_d,
            "sigma_min": prep.poincare.sigma_min,
            "sigma_resolved": prep.poincare.sigma_resolved,
            "poincare_kernel_dim": prep.poincare.kernel_dim,
            "alpha0": None if prep.params is None else prep.params.alpha0,
            "alpha1": None if prep.params is None else prep.params.alpha1,
            "tau_bar0": prep.tau_bar0,
        },
        "closure": prep.config.closure,
    }


def cmd_run(config: ExperimentConfig, out_dir: str | Path | None = None, threads: int = 1) -> int:
    """Run every epsilon trajectory and write CSVs plus the manifest.

    A solver failure aborts only its own epsilon; the manifest records the
    error.  Returns 0 when every epsilon ran cleanly.
    """
    prep = prepare(config)
    out = Path(out_dir if out_dir is not None else config.out)
    out.mkdir(parents=True, exist_ok=True)
    entries: list[dict] = []

    def run_one(eps: float) -> dict:
        try:
            return run_single_epsilon(prep, eps, out)
        except Exception as exc:  # noqa: BLE001 - recorded per epsilon
            return {"epsilon": eps, "status": f"error: {exc}"}

    if threads > 1 and len(config.epsilon_list) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(run_one, config.epsilon_list))
    else:
        entries = [run_one(eps) for eps in config.epsilon_list]

    manifest = _manifest_base(prep)
    manifest["runs"] = entries
    write_manifest(out / "manifest.json", manifest)
    failed = [entry for entry in entries if entry["status"] != "ok"]
    for entry in failed:
        print(f"epsilon {entry['epsilon']}: {entry['status']}")
    return 1 if failed else 0


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    layer_rate: float | None
    plateau_hminus1: float | None
    longtime_rate: float | None
    plateau_ratio: float | None = None


def summarize_run(
    columns: dict[str, list], dt: float, layer_steps: int = 20, plateau_window: tuple[float, float] = (0.3, 1.0)
) -> tuple[float | None, float | None, float | None]:
    """Extract (layer rate of dperp, plateau of the macro H^-1 distance,
    long-time rate of the full distance) from one diagnostics CSV."""
    t = np.array([v for v in columns["t"]], dtype=float)
    dperp = np.array([np.nan if v is None else v for v in columns["dperp"]], dtype=float)
    l2 = np.array([np.nan if v is None else v for v in columns["l2_dist"]], dtype=float)
    hmacro = np.array([np.nan if v is None else v for v in columns["hminus1_macro"]], dtype=float)

    layer_rate = None
    in_layer = t <= layer_steps * dt + 1e-12
    if in_layer.sum() >= 2 and np.isfinite(dperp[in_layer]).all() and (dperp[in_layer] > 0).all():
        layer_rate = diagnostics.fit_decay_rate(t[in_layer], dperp[in_layer]).rate

    plateau = None
    window = (t >= plateau_window[0]) & (t <= plateau_window[1]) & np.isfinite(hmacro)
    if window.any():
        plateau = float(np.median(hmacro[window]))

    longtime_rate = None
    tail = t >= 0.7 * t[-1]
    if tail.sum() >= 2 and (l2[tail] > 0).all():
        longtime_rate = diagnostics.fit_decay_rate(t[tail], l2[tail]).rate
    return layer_rate, plateau, longtime_rate


def cmd_sweep(config: ExperimentConfig, out_dir: str | Path | None = None, threads: int = 1) -> int:
    """Run the epsilon sweep and write a summary table of measured rates.

    For each epsilon: the initial-layer decay rate of the distance to local
    equilibrium, the post-layer plateau of the macro H^-1 distance, and the
    long-time decay rate; consecutive plateau ratios expose the first-order
    scaling in epsilon.
    """
    from .io import read_csv

    out = Path(out_dir if out_dir is not None else config.out)
    status = cmd_run(config, out_dir=out, threads=threads)
    rows: list[SweepRow] = []
    for eps in sorted(config.epsilon_list, reverse=True):
        csv_path = out / epsilon_label(eps) / "diagnostics.csv"
        if not csv_path.exists():
            continue
        layer, plateau, longtime = summarize_run(read_csv(csv_path), config.dt)
        rows.append(SweepRow(epsilon=eps, layer_rate=layer, plateau_hminus1=plateau, longtime_rate=longtime))
    if len(rows) > 1:
        rows = [rows[0]] + [
            SweepRow(
                epsilon=row.epsilon,
                layer_rate=row.layer_rate,
                plateau_hminus1=row.plateau_hminus1,
                longtime_rate=row.longtime_rate,
                plateau_ratio=(
                    None
                    if row.plateau_hminus1 in (None, 0.0) or prev.plateau_hminus1 is None
                    else prev.plateau_hminus1 / row.plateau_hminus1
                ),
            )
            for prev, row in zip(rows, rows[1:])
        ]
    header = ["epsilon", "layer_rate", "plateau_hminus1", "longtime_rate"]
    if len(rows) > 1:
        header.append("plateau_ratio")
    lines = [",".join(header)]
    for row in rows:
        cells = [repr(row.epsilon)]
        for name in ("layer_rate", "plateau_hminus1", "longtime_rate"):
            value = getattr(row, name)
            cells.append("" if value is None else repr(value))
        if len(rows) > 1:
            cells.append("" if row.plateau_ratio is None else repr(row.plateau_ratio))
        lines.append(",".join(cells))
    summary = "\n".join(lines) + "\n"
    (out / "sweep_summary.csv").write_text(summary, encoding="ascii")
    print(summary, end="")
    return status
