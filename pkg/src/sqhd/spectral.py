"""Kinetic-term machinery: periodic Laplacian, DFT diagonalization, phase unitaries.

The one-axis second-difference matrix is circulant,

    (D_1)_{ij} = 2[j=i] - [j=(i+1) mod n] - [j=(i-1) mod n],

and discretizes -d^2/dx^2 up to the 1/s^2 scale, so the full operator
(1/s^2) sum_axes I x ... x D_1 x ... x I is positive semidefinite.  Its
eigenbasis is the DFT, with per-axis eigenvalues 4 sin^2(k pi / n) / s^2,
which lets kinetic phase factors be applied with FFTs instead of dense
matrix exponentials.
"""

from dataclasses import dataclass

import numpy as np

from .grid import WaveState

_DENSE_CAP = 4096


def one_axis_difference(n):
    """Unscaled circulant second-difference matrix D_1 of size n (n >= 2)."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    mat = 2.0 * np.eye(n)
    for i in range(n):
        mat[i, (i + 1) % n] -= 1.0
        mat[i, (i - 1) % n] -= 1.0
    return mat


def dense_laplacian(grid):
    """Dense discretized -Laplacian: (1/s^2) sum of axis-wise Kronecker terms.

    Oracle-scale only: refuses grids beyond 4096 total points.
    """
    if grid.npoints > _DENSE_CAP:
        raise ValueError(
            f"dense Laplacian capped at {_DENSE_CAP} points, grid has {grid.npoints}"
        )
    d1 = one_axis_difference(grid.n_r)
    eye = np.eye(grid.n_r)
    total = np.zeros((grid.npoints, grid.npoints))
    for axis in range(grid.d):
        term = np.array([[1.0]])
        for j in range(grid.d):
            term = np.kron(term, d1 if j == axis else eye)
        total += term
    return total / grid.s**2


@dataclass(frozen=True)
class KineticSpectrum:
    """Per-axis eigenvalues of the discretized -Laplacian, ordered by k."""

    grid: "object"
    axis_eigenvalues: np.ndarray

    def dense_eigen_array(self):
        """d-dimensional eigenvalue array (sum over axes), shaped like the grid."""
        lam = self.axis_eigenvalues
        total = np.zeros(self.grid.shape)
        for axis in range(self.grid.d):
            shape = [1] * self.grid.d
            shape[axis] = self.grid.n_r
            total = total + lam.reshape(shape)
        return total


def laplacian_eigenvalues(grid):
    """Closed-form spectrum 4 sin^2(k pi / n_r) / s^2, k = 0..n_r-1."""
    k = np.arange(grid.n_r)
    lam = 4.0 * np.sin(k * np.pi / grid.n_r) ** 2 / grid.s**2
    return KineticSpectrum(grid, lam)


def _as_grid_array(state):
    return state.amplitudes.reshape(state.grid.shape)


def dft_forward(state):
    """Unitary DFT (kernel e^{-2 pi i jk/n} / sqrt(n)) along every axis."""
    out = np.fft.fftn(_as_grid_array(state), norm="ortho")
    return WaveState(state.grid, out.ravel())


def dft_inverse(state):
    """Inverse of dft_forward."""
    out = np.fft.ifftn(_as_grid_array(state), norm="ortho")
    return WaveState(state.grid, out.ravel())


def kinetic_phase_array(grid, theta, sign=1.0):
    """exp(-i * sign * theta * Lambda / 2) over the grid's Fourier modes."""
    spectrum = laplacian_eigenvalues(grid)
    return np.exp(-1j * sign * theta * spectrum.dense_eigen_array() / 2.0)


def apply_kinetic_phase(state, theta, sign=1.0):
    """Apply exp(-i * theta * (-Delta/2)) via FFT conjugation.

    The discretized -Delta is positive semidefinite, so the zero mode is
    untouched and positive theta rotates every other mode clockwise.  The
    sign flag flips the generator for sensitivity checks.
    """
    if not np.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    arr = np.fft.fftn(_as_grid_array(state), norm="ortho")
    arr *= kinetic_phase_array(state.grid, theta, sign)
    out = np.fft.ifftn(arr, norm="ortho")
    return WaveState(state.grid, out.ravel())
