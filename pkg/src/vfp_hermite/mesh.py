"""Periodic 1D finite-volume meshes.

A mesh is a partition of [a, b) into control volumes; all cell index
arithmetic is modulo N_x.  The regularity ratio R_h bounds how far the
mesh is from uniform and enters the nonuniform-mesh operator estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Mesh:
    """Periodic finite-volume mesh on [a, b).

    Attributes
    ----------
    a, b : domain endpoints.
    n_x : number of control volumes (>= 2).
    x_half : interface positions, shape (n_x + 1,), x_half[0] = a, x_half[-1] = b.
    x_center : cell centers (interface midpoints), shape (n_x,).
    dx : cell widths, shape (n_x,), all positive.
    """

    a: float
    b: float
    n_x: int
    x_half: np.ndarray
    x_center: np.ndarray
    dx: np.ndarray

    def __post_init__(self):
        if self.n_x < 2:
            raise ValueError(f"need at least 2 cells, got n_x={self.n_x}")
        if not self.a < self.b:
            raise ValueError(f"empty domain: a={self.a} >= b={self.b}")
        if self.x_half.shape != (self.n_x + 1,):
            raise ValueError("x_half must hold n_x + 1 interfaces")
        if not (np.diff(self.x_half) > 0).all():
            raise ValueError("interfaces must be strictly increasing")
        if not (self.dx > 0).all():
            raise ValueError("cell widths must be positive")
        # widths and interfaces may differ by a few ulps for exactly uniform
        # meshes, where dx is stored as the exact common width
        if np.abs(self.dx - np.diff(self.x_half)).max() > 16 * np.finfo(float).eps * (self.b - self.a):
            raise ValueError("dx inconsistent with interface positions")

    @property
    def h(self) -> float:
        """Largest cell width."""
        return float(self.dx.max())

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def r_h(self) -> float:
        return regularity_ratio(self)

    @property
    def dx_half(self) -> np.ndarray:
        """Center-to-center distances with periodic wrap (unused by the stencils)."""
        gaps = np.diff(self.x_center)
        wrap = (self.x_center[0] + self.length) - self.x_center[-1]
        return np.append(gaps, wrap)

    def neighbor(self, j: int, shift: int) -> int:
        """Periodic cell neighbor index."""
        return (j + shift) % self.n_x


def build_uniform_mesh(a: float, b: float, n_x: int) -> Mesh:
    """Uniform periodic mesh with exact common width (b - a) / n_x."""
    if n_x < 2:
        raise ValueError(f"need at least 2 cells, got n_x={n_x}")
    if not a < b:
        raise ValueError(f"empty domain: a={a} >= b={b}")
    w = (b - a) / n_x
    x_half = a + w * np.arange(n_x + 1)
    x_half[-1] = b
    dx = np.full(n_x, w)
    x_center = 0.5 * (x_half[:-1] + x_half[1:])
    return Mesh(a=float(a), b=float(b), n_x=int(n_x), x_half=x_half, x_center=x_center, dx=dx)


def build_perturbed_mesh(a: float, b: float, n_x: int, amplitude: float, seed: int) -> Mesh:
    """Deterministically jittered mesh for nonuniform-mesh checks.

    Each interior interface moves by at most amplitude * (b - a) / (2 n_x),
    so widths stay in [(1 - amplitude) w, (1 + amplitude) w] and
    R_h <= (1 + amplitude) / (1 - amplitude) - 1.
    """
    if not 0.0 <= amplitude < 1.0:
        raise ValueError(f"amplitude must lie in [0, 1), got {amplitude}")
    base = build_uniform_mesh(a, b, n_x)
    if amplitude == 0.0:
        return base
    rng = np.random.default_rng(seed)
    w = (b - a) / n_x
    x_half = base.x_half.copy()
    jitter = rng.uniform(-1.0, 1.0, size=n_x - 1) * (amplitude * w / 2.0)
    x_half[1:-1] += jitter
    dx = np.diff(x_half)
    x_center = 0.5 * (x_half[:-1] + x_half[1:])
    return Mesh(a=float(a), b=float(b), n_x=int(n_x), x_half=x_half, x_center=x_center, dx=dx)


def regularity_ratio(mesh: Mesh) -> float:
    """sup over cell pairs of |dx_j / dx_i - 1|.

    The supremum is attained at the extreme width pair, so only
    max / min is needed.
    """
    lo = float(mesh.dx.min())
    hi = float(mesh.dx.max())
    return hi / lo - 1.0
