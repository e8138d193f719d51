import numpy as np
import pytest
from scipy.stats import chisquare

from sqhd.grid import (
    DensityState,
    GridSpec,
    WaveState,
    basis_state,
    coord_of_index,
    expect_diagonal,
    index_of_coords,
    measure_position,
    uniform_state,
    write_distribution_csv,
)


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(d=0, n_r=4)
    with pytest.raises(ValueError):
        GridSpec(d=1, n_r=3)
    with pytest.raises(ValueError):
        GridSpec(d=1, n_r=1)
    g = GridSpec(d=2, n_r=8)
    assert g.s * g.n_r == 2.0
    assert g.npoints == 64


def test_axis_coords_inside_open_box():
    g = GridSpec(d=1, n_r=16)
    x = g.axis_coords()
    assert np.all(x > -1.0) and np.all(x < 1.0)
    assert np.allclose(np.diff(x), g.s)


def test_coord_of_index_examples():
    g1 = GridSpec(d=1, n_r=2)
    assert np.allclose(coord_of_index(g1, 0), [-0.5])
    assert np.allclose(coord_of_index(g1, 1), [0.5])
    # row-major decode of index 5 on a 4x4 grid is axis indices (1, 1)
    g2 = GridSpec(d=2, n_r=4)
    expected = np.array([-1 + (2 * 1 + 1) / 4, -1 + (2 * 1 + 1) / 4])
    assert np.allclose(coord_of_index(g2, 5), expected)
    with pytest.raises(IndexError):
        coord_of_index(g2, 16)
    with pytest.raises(IndexError):
        coord_of_index(g2, -1)


def test_coord_index_round_trip():
    for d, n_r in [(1, 64), (2, 16), (3, 8), (3, 4)]:
        g = GridSpec(d=d, n_r=n_r)
        for k in range(g.npoints):
            assert index_of_coords(g, coord_of_index(g, k)) == k


def test_coordinates_match_coord_of_index():
    g = GridSpec(d=2, n_r=8)
    coords = g.coordinates()
    for k in (0, 7, 13, 63):
        assert np.allclose(coords[k], coord_of_index(g, k))


def test_uniform_state_amplitudes():
    assert np.allclose(uniform_state(GridSpec(1, 4)).amplitudes, 0.5)
    assert np.allclose(uniform_state(GridSpec(2, 2)).amplitudes, 0.5)
    assert np.allclose(uniform_state(GridSpec(2, 16)).amplitudes, 1 / 16)


def test_wavestate_rejects_unnormalized():
    g = GridSpec(1, 4)
    with pytest.raises(ValueError):
        WaveState(g, np.ones(4, dtype=complex))
    with pytest.raises(ValueError):
        WaveState(g, np.ones(3, dtype=complex) / np.sqrt(3))


def test_density_state_invariants():
    g = GridSpec(1, 2)
    DensityState(g, np.eye(2) / 2)
    with pytest.raises(ValueError):
        DensityState(g, np.array([[0.5, 0.1j], [0.1j, 0.5]]))  # not Hermitian
    with pytest.raises(ValueError):
        DensityState(g, np.eye(2))  # trace 2
    with pytest.raises(ValueError):
        DensityState(g, np.diag([1.5, -0.5]))  # negative eigenvalue


def test_measure_basis_state_is_point_mass():
    g = GridSpec(d=2, n_r=4)
    rng = np.random.default_rng(0)
    st = basis_state(g, 9)
    for _ in range(5):
        assert np.allclose(measure_position(st, rng), coord_of_index(g, 9))


def test_measure_uniform_two_points():
    g = GridSpec(d=1, n_r=2)
    rng = np.random.default_rng(1)
    draws = np.array([measure_position(uniform_state(g), rng)[0] for _ in range(2000)])
    assert set(np.unique(draws)) == {-0.5, 0.5}
    assert abs((draws > 0).mean() - 0.5) < 0.05


def test_measure_uniform_chi_square():
    g = GridSpec(d=1, n_r=8)
    rng = np.random.default_rng(7)
    st = uniform_state(g)
    idx = np.array([index_of_coords(g, measure_position(st, rng)) for _ in range(10_000)])
    counts = np.bincount(idx, minlength=8)
    _, pvalue = chisquare(counts)
    assert pvalue > 0.001


def test_measure_is_seed_reproducible():
    g = GridSpec(d=1, n_r=16)
    st = uniform_state(g)
    a = [measure_position(st, np.random.default_rng(3))[0] for _ in range(10)]
    b = [measure_position(st, np.random.default_rng(3))[0] for _ in range(10)]
    assert a == b


def test_measure_rejects_drifted_norm():
    g = GridSpec(1, 4)
    st = uniform_state(g)
    object.__setattr__(st, "amplitudes", st.amplitudes * (1 + 1e-5))
    with pytest.raises(ValueError):
        measure_position(st, np.random.default_rng(0))


def test_expect_diagonal_examples():
    g = GridSpec(d=1, n_r=4)
    assert expect_diagonal(uniform_state(g), np.array([0.0, 1.0, 2.0, 3.0])) == pytest.approx(1.5)
    vals = np.array([3.0, -1.0, 2.0, 0.5])
    assert expect_diagonal(basis_state(g, 2), vals) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        expect_diagonal(uniform_state(g), np.zeros(5))


def test_expect_diagonal_matches_extended_precision_sum():
    rng = np.random.default_rng(11)
    g = GridSpec(d=2, n_r=8)
    amps = rng.normal(size=g.npoints) + 1j * rng.normal(size=g.npoints)
    amps /= np.linalg.norm(amps)
    st = WaveState(g, amps)
    vals = rng.normal(size=g.npoints)
    # independent high-precision accumulation
    acc = np.longdouble(0)
    for a, v in zip(amps, vals):
        acc += np.longdouble(abs(a) ** 2) * np.longdouble(v)
    assert abs(expect_diagonal(st, vals) - float(acc)) < 1e-12


def test_expect_diagonal_of_ones_is_one():
    rng = np.random.default_rng(2)
    for d, n_r in [(1, 32), (2, 8)]:
        g = GridSpec(d, n_r)
        amps = rng.normal(size=g.npoints) + 1j * rng.normal(size=g.npoints)
        amps /= np.linalg.norm(amps)
        st = WaveState(g, amps)
        assert expect_diagonal(st, np.ones(g.npoints)) == pytest.approx(1.0, abs=1e-12)


def test_distribution_csv(tmp_path):
    g = GridSpec(d=2, n_r=2)
    path = tmp_path / "dist.csv"
    write_distribution_csv(path, g, uniform_state(g).probabilities())
    lines = path.read_text().splitlines()
    assert lines[0] == "x1,x2,probability"
    assert len(lines) == 5
    first = lines[1].split(",")
    assert float(first[0]) == -0.5 and float(first[1]) == -0.5
    assert float(first[2]) == pytest.approx(0.25)
