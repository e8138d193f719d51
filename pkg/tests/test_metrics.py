import numpy as np
import pytest

from sqhd.metrics import (
    MetricPoint,
    expected_loss,
    success_indicator,
    success_probability,
)


def test_expected_loss_uniform():
    assert expected_loss([0.5, 0.5], [0.0, 1.0], 0.0) == pytest.approx(0.5)


def test_expected_loss_point_mass_at_argmin():
    assert expected_loss([0.0, 1.0, 0.0], [3.0, -1.0, 2.0], -1.0) == 0.0


def test_expected_loss_matches_direct_sum():
    rng = np.random.default_rng(0)
    p = rng.random(256)
    p /= p.sum()
    f = rng.normal(size=256)
    direct = float(np.longdouble(0) + sum(np.longdouble(a) * np.longdouble(b) for a, b in zip(p, f)))
    assert expected_loss(p, f, 0.0) == pytest.approx(direct, abs=1e-12)


def test_expected_loss_guard_band():
    assert expected_loss([1.0], [1.0], 1.0 + 5e-10) == 0.0
    # beyond the guard the negative value passes through for callers to reject
    assert expected_loss([1.0], [1.0], 1.001) < -1e-9


def test_expected_loss_validation():
    with pytest.raises(ValueError):
        expected_loss([0.5, 0.4], [0.0, 1.0], 0.0)
    with pytest.raises(ValueError):
        expected_loss([0.5, 0.5], [0.0, 1.0, 2.0], 0.0)


def test_expected_loss_permutation_invariant():
    rng = np.random.default_rng(5)
    p = rng.random(64)
    p /= p.sum()
    f = rng.normal(size=64)
    perm = rng.permutation(64)
    assert expected_loss(p[perm], f[perm], -1.0) == pytest.approx(
        expected_loss(p, f, -1.0), abs=1e-13
    )


def test_success_probability_examples():
    p = np.full(4, 0.25)
    f = np.array([0.0, 0.02, 0.5, 0.9])
    assert success_probability(p, f, 0.0, 1.0, 0.05) == pytest.approx(0.5)
    assert success_probability([0.0, 1.0], [1.0, 0.0], 0.0, 1.0, 0.3) == 1.0
    # delta = 1: everything below the exact maximum counts
    assert success_probability(p, f, 0.0, 0.9, 1.0) == pytest.approx(0.75)
    assert success_probability(p, f, 0.0, 1.0, 1.0) == 1.0


def test_success_probability_monotone_in_delta():
    rng = np.random.default_rng(1)
    p = rng.random(100)
    p /= p.sum()
    f = rng.normal(size=100)
    fmin, fmax = f.min(), f.max()
    vals = [success_probability(p, f, fmin, fmax, d) for d in (0.05, 0.1, 0.3, 0.7, 1.0)]
    assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))


def test_success_probability_validation():
    with pytest.raises(ValueError):
        success_probability([1.0], [0.0], 1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        success_probability([1.0], [0.0], 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        success_probability([1.0], [0.0], 0.0, 1.0, 1.5)


def test_success_indicator():
    ind = success_indicator([0.0, 0.4, 1.0], 0.0, 1.0, 0.5)
    assert ind.tolist() == [True, True, False]


def test_metric_point_ranges():
    MetricPoint(0.0, 0.5, 0.2)
    MetricPoint(1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        MetricPoint(0.0, -1e-6, 0.5)
    with pytest.raises(ValueError):
        MetricPoint(0.0, 0.1, 1.2)
