import numpy as np
import pytest
from scipy.linalg import expm

from sqhd.grid import GridSpec, WaveState, basis_state, uniform_state
from sqhd.spectral import (
    apply_kinetic_phase,
    dense_laplacian,
    dft_forward,
    dft_inverse,
    laplacian_eigenvalues,
    one_axis_difference,
)


def random_state(grid, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=grid.npoints) + 1j * rng.normal(size=grid.npoints)
    return WaveState(grid, amps / np.linalg.norm(amps))


def test_one_axis_difference_n3_wraparound():
    # n=3 makes the +1 and -1 wraparound entries land on the same cells
    expected = np.array([[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [-1.0, -1.0, 2.0]])
    assert np.array_equal(one_axis_difference(3), expected)


def test_dense_laplacian_n4():
    g = GridSpec(d=1, n_r=4)
    lap = dense_laplacian(g)
    assert np.allclose(lap[0], [8.0, -4.0, 0.0, -4.0])
    for i in range(4):
        assert np.allclose(np.roll(lap[0], i), lap[i])


def test_dense_laplacian_properties():
    for d, n_r in [(1, 8), (2, 4)]:
        g = GridSpec(d, n_r)
        lap = dense_laplacian(g)
        assert np.allclose(lap, lap.T)
        assert np.allclose(lap @ np.ones(g.npoints), 0.0)
        assert np.linalg.eigvalsh(lap)[0] > -1e-10


def test_dense_laplacian_cap():
    with pytest.raises(ValueError):
        dense_laplacian(GridSpec(d=2, n_r=128))


def test_eigenvalue_closed_form():
    g = GridSpec(d=1, n_r=4)
    lam = laplacian_eigenvalues(g).axis_eigenvalues
    assert lam[0] == 0.0
    assert lam[2] == pytest.approx(16.0)
    assert lam[1] == pytest.approx(8.0)
    assert lam[3] == pytest.approx(8.0)
    assert lam.max() == pytest.approx(4.0 / g.s**2)


def test_spectrum_matches_dense_eigendecomposition():
    for d, n_r in [(1, 8), (1, 16), (2, 4), (2, 8)]:
        g = GridSpec(d, n_r)
        dense = np.sort(np.linalg.eigvalsh(dense_laplacian(g)))
        closed = np.sort(laplacian_eigenvalues(g).dense_eigen_array().ravel())
        assert np.max(np.abs(dense - closed)) < 1e-9


def test_dft_of_delta_is_uniform():
    g = GridSpec(d=1, n_r=8)
    out = dft_forward(basis_state(g, 0))
    assert np.allclose(out.amplitudes, 1 / np.sqrt(8))


def test_dft_kernel_n2():
    g = GridSpec(d=1, n_r=2)
    cols = [dft_forward(basis_state(g, k)).amplitudes for k in range(2)]
    mat = np.stack(cols, axis=1)
    assert np.allclose(mat, np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def test_dft_round_trip():
    for seed, (d, n_r) in enumerate([(1, 16), (2, 8)]):
        st = random_state(GridSpec(d, n_r), seed)
        back = dft_inverse(dft_forward(st))
        assert np.max(np.abs(back.amplitudes - st.amplitudes)) < 1e-12


def test_kinetic_phase_leaves_uniform_alone():
    g = GridSpec(d=2, n_r=4)
    st = uniform_state(g)
    out = apply_kinetic_phase(st, 1.7)
    assert np.max(np.abs(out.amplitudes - st.amplitudes)) < 1e-12


def test_kinetic_phase_zero_theta_identity():
    st = random_state(GridSpec(1, 8), 3)
    out = apply_kinetic_phase(st, 0.0)
    assert np.max(np.abs(out.amplitudes - st.amplitudes)) < 1e-14


def test_kinetic_phase_matches_dense_expm():
    g = GridSpec(d=1, n_r=8)
    st = random_state(g, 4)
    theta = 0.3
    expected = expm(-1j * theta * dense_laplacian(g) / 2.0) @ st.amplitudes
    out = apply_kinetic_phase(st, theta)
    assert np.linalg.norm(out.amplitudes - expected) < 1e-8


def test_kinetic_phase_sign_flag():
    g = GridSpec(d=1, n_r=8)
    st = random_state(g, 5)
    flipped = apply_kinetic_phase(st, 0.4, sign=-1.0)
    expected = expm(+1j * 0.4 * dense_laplacian(g) / 2.0) @ st.amplitudes
    assert np.linalg.norm(flipped.amplitudes - expected) < 1e-8


def test_kinetic_phase_unitary_and_composition():
    rng = np.random.default_rng(6)
    for d, n_r in [(1, 32), (2, 8)]:
        st = random_state(GridSpec(d, n_r), rng.integers(1 << 30))
        t1, t2 = rng.uniform(-2, 2, size=2)
        assert abs(np.linalg.norm(apply_kinetic_phase(st, t1).amplitudes) - 1.0) < 1e-12
        once = apply_kinetic_phase(apply_kinetic_phase(st, t1), t2)
        both = apply_kinetic_phase(st, t1 + t2)
        assert np.max(np.abs(once.amplitudes - both.amplitudes)) < 1e-11


def test_kinetic_phase_rejects_nonfinite_theta():
    with pytest.raises(ValueError):
        apply_kinetic_phase(uniform_state(GridSpec(1, 4)), np.inf)
