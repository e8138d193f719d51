"""Discretized domain, state containers, and diagonal-observable helpers.

The computational domain is the cell-centered product grid on [-1, 1]^d:
along each axis the n_r points sit at -1 + (2k+1)/n_r, k = 0..n_r-1, with
spacing s = 2/n_r.  Flat indices are row-major with axis 0 slowest, fixed
globally so that every module agrees on the tensor-product ordering.
The circulant kinetic operator identifies -1 with +1 (periodic wrap).
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Cell-centered grid on [-1, 1]^d with n_r points per axis (power of two)."""

    d: int
    n_r: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.n_r < 2 or (self.n_r & (self.n_r - 1)) != 0:
            raise ValueError(f"n_r must be a power of two >= 2, got {self.n_r}")

    @property
    def s(self):
        """Grid spacing 2/n_r."""
        return 2.0 / self.n_r

    @property
    def npoints(self):
        return self.n_r**self.d

    @property
    def shape(self):
        return (self.n_r,) * self.d

    def axis_coords(self):
        """Per-axis coordinate vector -1 + (2k+1)/n_r, k = 0..n_r-1."""
        k = np.arange(self.n_r)
        return -1.0 + (2 * k + 1) / self.n_r

    def coordinates(self):
        """All grid points as an (npoints, d) array in flat-index order."""
        axes = np.meshgrid(*([self.axis_coords()] * self.d), indexing="ij")
        return np.stack([a.ravel() for a in axes], axis=-1)


def coord_of_index(grid, flat_index):
    """Decode a flat index into its d per-axis coordinates (axis 0 slowest)."""
    if not 0 <= flat_index < grid.npoints:
        raise IndexError(f"flat index {flat_index} out of range for {grid.npoints} points")
    axis_idx = np.unravel_index(flat_index, grid.shape)
    return np.array([-1.0 + (2 * k + 1) / grid.n_r for k in axis_idx])


def index_of_coords(grid, point):
    """Inverse of coord_of_index; point must lie on the grid up to rounding."""
    point = np.asarray(point, dtype=float)
    if point.shape != (grid.d,):
        raise ValueError(f"point must have shape ({grid.d},), got {point.shape}")
    k = (point + 1.0) * grid.n_r / 2.0 - 0.5
    axis_idx = np.rint(k).astype(int)
    if np.any(axis_idx < 0) or np.any(axis_idx >= grid.n_r):
        raise ValueError(f"point {point} is not on the grid")
    if not np.allclose(k, axis_idx, atol=1e-9):
        raise ValueError(f"point {point} is not on the grid")
    return int(np.ravel_multi_index(tuple(axis_idx), grid.shape))


@dataclass(frozen=True)
class WaveState:
    """Pure state: normalized complex amplitudes over grid points (flat order)."""

    grid: GridSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (self.grid.npoints,):
            raise ValueError(
                f"amplitudes must have shape ({self.grid.npoints},), got {amps.shape}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond 1e-10")

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class DensityState:
    """Mixed state: Hermitian, unit-trace, PSD matrix over grid points."""

    grid: GridSpec
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        n = self.grid.npoints
        if m.shape != (n, n):
            raise ValueError(f"matrix must have shape ({n}, {n}), got {m.shape}")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > 1e-10:
            raise ValueError(f"Hermiticity residual {herm:.3e} exceeds 1e-10")
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-8:
            raise ValueError(f"trace {tr!r} deviates from 1 beyond 1e-8")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < -1e-8:
            raise ValueError(f"minimum eigenvalue {min_eig:.3e} below -1e-8")

    def probabilities(self):
        return np.real(np.diag(self.matrix))


def uniform_state(grid):
    """Equal-superposition state: every amplitude n_r^(-d/2)."""
    amp = grid.n_r ** (-grid.d / 2.0)
    return WaveState(grid, np.full(grid.npoints, amp, dtype=complex))


def basis_state(grid, flat_index):
    """Point mass at one grid point."""
    if not 0 <= flat_index < grid.npoints:
        raise IndexError(f"flat index {flat_index} out of range")
    amps = np.zeros(grid.npoints, dtype=complex)
    amps[flat_index] = 1.0
    return WaveState(grid, amps)


def measure_position(state, rng):
    """Sample one grid point from |amplitude|^2 and return its coordinates.

    Rejects states whose norm drifted beyond 1e-6 instead of renormalizing,
    so integration bugs surface here rather than being papered over.
    """
    p = state.probabilities()
    total = p.sum()
    if abs(np.sqrt(total) - 1.0) > 1e-6:
        raise ValueError(f"state norm {np.sqrt(total)!r} drifted beyond 1e-6")
    idx = rng.choice(state.grid.npoints, p=p / total)
    return coord_of_index(state.grid, int(idx))


def expect_diagonal(state, values):
    """Expectation sum_k |amplitude_k|^2 * values_k of a diagonal observable."""
    values = np.asarray(values, dtype=float)
    if values.shape != (state.grid.npoints,):
        raise ValueError(
            f"values must have length {state.grid.npoints}, got {values.shape}"
        )
    return float(np.dot(state.probabilities(), values))


def write_distribution_csv(path, grid, probabilities):
    """Write (axis coordinates..., probability) rows in flat-index order."""
    probabilities = np.asarray(probabilities, dtype=float)
    if probabilities.shape != (grid.npoints,):
        raise ValueError(f"probabilities must have length {grid.npoints}")
    coords = grid.coordinates()
    header = ",".join(f"x{j + 1}" for j in range(grid.d)) + ",probability"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row, p in zip(coords, probabilities):
            cells = [format(c, ".17g") for c in row] + [format(p, ".17g")]
            fh.write(",".join(cells) + "\n")
