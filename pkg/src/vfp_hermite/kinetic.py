"""Implicit Euler stepper for the coupled Hermite / finite-volume system.

One step solves (I + dt L) D^{n+1} = D^n where mode k of L couples to
mode k-1 through (sqrt(k) / eps) A, to mode k+1 through
-(sqrt(k+1) / eps) A*, and carries the damping k / tau(eps) on its
diagonal.  The last retained mode drops its upward coupling (spectral
truncation closure).  The matrix is time independent, so it is assembled
and factored once and reused for every step; below a size threshold a
direct sparse LU is used, above it a Krylov solve with a fixed relative
tolerance.

Unknown ordering is mode-major: flat index = k * n_x + j.  Checkpoints
use the same ordering (row-major 64-bit floats, little-endian) behind a
16-byte header.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from . import operators
from .equilibrium import EquilibriumField
from .hermite import CoefficientField
from .mesh import Mesh

TAU_QUADRATIC = "quadratic"
TAU_POWER = "power"
TAU_FIXED = "fixed"

DIRECT_SOLVE_LIMIT = 200_000

CHECKPOINT_MAGIC = b"VFPD"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class SchemeConfig:
    """Scaling, time step and closure parameters for one kinetic run.

    tau_law selects tau(eps): "quadratic" tau0 * eps^2, "power" eps^beta
    with beta in [1, 2), or "fixed" tau_c.  tau_bar0 is the configured
    bound on tau(eps) / eps across a sweep; it defaults to the value for
    this run's eps and feeds the entropy coefficient defaults.
    """

    epsilon: float
    dt: float
    n_h: int
    tau_law: str = TAU_QUADRATIC
    tau0: float = 5.0
    beta: float | None = None
    tau_c: float | None = None
    T0: float = 1.0
    closure: str = "truncate"
    linear_tol: float = 1e-12
    tau_bar0: float | None = None

    def __post_init__(self):
        if self.epsilon <= 0 or self.dt <= 0 or self.T0 <= 0:
            raise ValueError("epsilon, dt and T0 must be positive")
        if self.n_h < 1:
            raise ValueError(f"need at least one Hermite mode, got {self.n_h}")
        if self.closure != "truncate":
            raise ValueError(f"unknown closure {self.closure!r}")
        if self.tau_law not in (TAU_QUADRATIC, TAU_POWER, TAU_FIXED):
            raise ValueError(f"unknown tau law {self.tau_law!r}")
        if self.tau_law == TAU_QUADRATIC and self.tau0 <= 0:
            raise ValueError("tau0 must be positive")
        if self.tau_law == TAU_POWER:
            if self.beta is None or not 1.0 <= self.beta < 2.0:
                raise ValueError("power law needs beta in [1, 2)")
        if self.tau_law == TAU_FIXED and (self.tau_c is None or self.tau_c <= 0):
            raise ValueError("fixed law needs positive tau_c")
        if self.tau_bar0 is None:
            object.__setattr__(self, "tau_bar0", self.tau() / self.epsilon)
        elif self.tau() / self.epsilon > self.tau_bar0 * (1 + 1e-12):
            raise ValueError(
                f"tau(eps)/eps = {self.tau() / self.epsilon} exceeds tau_bar0 = {self.tau_bar0}"
            )

    def tau(self, epsilon: float | None = None) -> float:
        eps = self.epsilon if epsilon is None else epsilon
        if self.tau_law == TAU_QUADRATIC:
            return self.tau0 * eps**2
        if self.tau_law == TAU_POWER:
            return eps**self.beta
        return self.tau_c


@dataclass
class GlobalSystem:
    """Assembled and factored time-independent system I + dt L."""

    field: EquilibriumField
    mesh: Mesh
    config: SchemeConfig
    matrix: scipy.sparse.csc_matrix
    generator: scipy.sparse.csr_matrix
    _solve: object = dc_field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return self.config.n_h * self.mesh.n_x

    def solve(self, rhs_flat: np.ndarray) -> np.ndarray:
        return self._solve(rhs_flat)


def assemble_global(field: EquilibriumField, mesh: Mesh, config: SchemeConfig) -> GlobalSystem:
    """Build and factor I + dt L in mode-major ordering.

    The symmetric part of the system is positive definite (skew transport
    plus nonnegative damping), so the factorization cannot encounter a
    singular pivot; a failure is re-raised with context.
    """
    n_h, n_x = config.n_h, mesh.n_x
    eps, dt, tau = config.epsilon, config.dt, config.tau()
    mat_a = operators.assemble_matrix(field, mesh, operators.KIND_A).tocoo()
    mat_astar = operators.assemble_matrix(field, mesh, operators.KIND_A_STAR).tocoo()

    rows, cols, vals = [], [], []
    for k in range(n_h):
        offset = k * n_x
        if k > 0:
            scale = np.sqrt(k) / eps
            rows.append(mat_a.row + offset)
            cols.append(mat_a.col + offset - n_x)
            vals.append(scale * mat_a.data)
        if k < n_h - 1:  # closure: the last mode drops its upward coupling
            scale = -np.sqrt(k + 1.0) / eps
            rows.append(mat_astar.row + offset)
            cols.append(mat_astar.col + offset + n_x)
            vals.append(scale * mat_astar.data)
        if k > 0:
            rows.append(np.arange(offset, offset + n_x))
            cols.append(np.arange(offset, offset + n_x))
            vals.append(np.full(n_x, k / tau))
    dim = n_h * n_x
    if rows:
        generator = scipy.sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
        )
    else:
        generator = scipy.sparse.csr_matrix((dim, dim))
    matrix = (scipy.sparse.identity(dim, format="csr") + dt * generator).tocsc()

    if dim <= DIRECT_SOLVE_LIMIT:
        try:
            lu = scipy.sparse.linalg.splu(matrix)
        except RuntimeError as exc:  # pragma: no cover - not reachable for valid inputs
            raise RuntimeError(f"sparse factorization failed: {exc}") from exc
        solve = lu.solve
    else:
        ilu = scipy.sparse.linalg.spilu(matrix, drop_tol=1e-8)
        prec = scipy.sparse.linalg.LinearOperator((dim, dim), ilu.solve)

        def solve(rhs, _matrix=matrix, _prec=prec, _tol=config.linear_tol):
            x, info = scipy.sparse.linalg.lgmres(_matrix, rhs, M=_prec, rtol=_tol, atol=0.0)
            if info != 0:
                residual = np.linalg.norm(_matrix @ x - rhs)
                raise RuntimeError(
                    f"iterative solve did not converge (info={info}, residual={residual:.3e})"
                )
            return x

    return GlobalSystem(field=field, mesh=mesh, config=config, matrix=matrix, generator=generator, _solve=solve)


def step(system: GlobalSystem, coeffs: CoefficientField) -> CoefficientField:
    """Advance one implicit Euler step."""
    if coeffs.D.shape != (system.config.n_h, system.mesh.n_x):
        raise ValueError(
            f"coefficient shape {coeffs.D.shape} does not match system "
            f"({system.config.n_h}, {system.mesh.n_x})"
        )
    flat = system.solve(coeffs.D.reshape(-1))
    return CoefficientField(D=flat.reshape(system.config.n_h, system.mesh.n_x), field=coeffs.field)


def run(
    field: EquilibriumField,
    mesh: Mesh,
    config: SchemeConfig,
    d0: CoefficientField,
    n_steps: int,
    diag_every: int,
    sink=None,
    *,
    system: GlobalSystem | None = None,
    recorder=None,
    checkpoint_every: int = 0,
    checkpoint_dir: str | Path | None = None,
    checkpoint_hook=None,
) -> CoefficientField:
    """Advance n_steps from d0, emitting diagnostics records to the sink.

    recorder(step, t, coeffs) builds the record; when omitted only the
    checkpoint hooks run.  Records are emitted at step 0, every diag_every
    steps, and at the final step.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be nonnegative, got {n_steps}")
    if system is None:
        system = assemble_global(field, mesh, config)

    def record(step_index: int, current: CoefficientField) -> None:
        if sink is not None and recorder is not None:
            sink.emit(recorder(step_index, step_index * config.dt, current))

    def checkpoint(step_index: int, current: CoefficientField) -> None:
        if checkpoint_every and step_index % checkpoint_every == 0:
            if checkpoint_hook is not None:
                checkpoint_hook(step_index, current)
            elif checkpoint_dir is not None:
                save_checkpoint(Path(checkpoint_dir) / f"step_{step_index:08d}.ckpt", current)

    coeffs = d0
    if diag_every > 0:
        record(0, coeffs)
    checkpoint(0, coeffs)
    for n in range(1, n_steps + 1):
        coeffs = step(system, coeffs)
        if diag_every > 0 and (n % diag_every == 0 or n == n_steps):
            record(n, coeffs)
        checkpoint(n, coeffs)
    return coeffs


def save_checkpoint(path: str | Path, coeffs: CoefficientField) -> None:
    """Binary dump: magic, version, n_h, n_x (uint32 LE) then the row-major
    float64 LE coefficient matrix."""
    header = CHECKPOINT_MAGIC + struct.pack("<III", CHECKPOINT_VERSION, coeffs.n_h, coeffs.n_x)
    payload = np.ascontiguousarray(coeffs.D, dtype="<f8").tobytes()
    Path(path).write_bytes(header + payload)


def load_checkpoint(path: str | Path, field: EquilibriumField) -> CoefficientField:
    raw = Path(path).read_bytes()
    if len(raw) < 16 or raw[:4] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a coefficient checkpoint")
    version, n_h, n_x = struct.unpack("<III", raw[4:16])
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    expected = 16 + 8 * n_h * n_x
    if len(raw) != expected:
        raise ValueError(f"{path}: truncated checkpoint ({len(raw)} bytes, expected {expected})")
    data = np.frombuffer(raw[16:], dtype="<f8").reshape(n_h, n_x).astype(float)
    return CoefficientField(D=data, field=field)
