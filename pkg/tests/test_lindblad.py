import numpy as np
import pytest
from dataclasses import replace
from scipy.linalg import expm

from sqhd.grid import DensityState, GridSpec, basis_state
from sqhd.objectives import make_convex_quadratic, FiniteSumObjective
from sqhd.schedules import Schedule, log_time_sis_schedule, sgdm_schedule
from sqhd.dynamics import RunConfig
from sqhd.lindblad import (
    GeneratorConfig,
    InvariantViolation,
    _uniform_density,
    gamma_matrix,
    integrate,
    integrate_path,
    lindblad_rhs,
    trace_distance,
    trace_distance_matrices,
    weak_approx_report,
)


def pair_objective():
    return make_convex_quadratic([[-0.5], [0.5]])


def smooth_schedule():
    return log_time_sis_schedule(C=2.0, t_eps=1.0)


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def random_density(grid, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(grid.npoints, grid.npoints)) + 1j * rng.normal(
        size=(grid.npoints, grid.npoints)
    )
    rho = a @ a.conj().T
    return DensityState(grid, rho / np.trace(rho).real)


# ---------------------------------------------------------------------------
# generator


def test_rhs_without_noise_is_commutator():
    grid = GridSpec(1, 4)
    gen = GeneratorConfig(pair_objective(), grid, smooth_schedule(), eta=0.0)
    rho = random_density(grid, 0)
    t = 0.8
    psi, chi, u = gen.schedule.psi_exp(t), gen.schedule.chi_exp(t), gen.schedule.u(t)
    h = psi * gen.kinetic + chi * np.diag(gen.fvec)
    expected = -1j * u * (h @ rho.matrix - rho.matrix @ h)
    assert np.max(np.abs(lindblad_rhs(rho, t, gen) - expected)) < 1e-12


def test_rhs_maximally_mixed_is_zero():
    grid = GridSpec(1, 8)
    gen = GeneratorConfig(pair_objective(), grid, smooth_schedule(), eta=0.1)
    rho = DensityState(grid, np.eye(8) / 8)
    assert np.max(np.abs(lindblad_rhs(rho, 0.5, gen))) < 1e-12


def test_rhs_hermitian_and_traceless():
    grid = GridSpec(1, 4)
    gen = GeneratorConfig(pair_objective(), grid, smooth_schedule(), eta=0.3)
    rho = random_density(grid, 1)
    out = lindblad_rhs(rho, 1.1, gen)
    assert np.max(np.abs(out - out.conj().T)) < 1e-12
    assert abs(np.trace(out)) < 1e-12


def test_rhs_matches_jump_operator_form():
    # independent assembly: sum_jk gamma_jk (A_j rho A_k^+ - {A_k^+ A_j, rho}/2)
    # with A_j = u sqrt(eta) e^chi F_j and gamma = I/m - 1/m^2
    for m, seed in [(2, 2), (3, 3), (4, 4)]:
        centers = np.linspace(-0.6, 0.6, m)[:, None]
        obj = make_convex_quadratic(centers)
        grid = GridSpec(1, 8)
        sched = smooth_schedule()
        gen = GeneratorConfig(obj, grid, sched, eta=0.2)
        rho = random_hermitian(8, seed)
        t = 0.6
        u, psi, chi = sched.u(t), sched.psi_exp(t), sched.chi_exp(t)
        h = psi * gen.kinetic + chi * np.diag(gen.fvec)
        oracle = -1j * u * (h @ rho - rho @ h)
        gamma = gamma_matrix(m)
        jumps = [u * np.sqrt(gen.eta) * chi * np.diag(gen.ftable[j]) for j in range(m)]
        for j in range(m):
            for k in range(m):
                aj, ak = jumps[j], jumps[k]
                oracle += gamma[j, k] * (
                    aj @ rho @ ak.conj().T
                    - 0.5 * (ak.conj().T @ aj @ rho + rho @ ak.conj().T @ aj)
                )
        assert np.max(np.abs(gen.rhs(rho, t) - oracle)) < 1e-10


def test_noise_sign_flag_flips_diffusion():
    grid = GridSpec(1, 4)
    obj = pair_objective()
    plus = GeneratorConfig(obj, grid, smooth_schedule(), eta=0.2, noise_sign=1.0)
    minus = GeneratorConfig(obj, grid, smooth_schedule(), eta=0.2, noise_sign=-1.0)
    rho = random_density(grid, 5).matrix
    t = 0.4
    drift = GeneratorConfig(obj, grid, smooth_schedule(), eta=0.0).rhs(rho, t)
    assert np.max(np.abs((plus.rhs(rho, t) - drift) + (minus.rhs(rho, t) - drift))) < 1e-12


def test_gamma_matrix_psd_up_to_16():
    for m in range(1, 17):
        assert np.linalg.eigvalsh(gamma_matrix(m))[0] >= -1e-12


def test_generator_size_cap():
    with pytest.raises(ValueError):
        GeneratorConfig(pair_objective(), GridSpec(1, 512), smooth_schedule(), eta=0.1)


# ---------------------------------------------------------------------------
# integration


def test_integrate_zero_span_is_identity():
    grid = GridSpec(1, 4)
    gen = GeneratorConfig(pair_objective(), grid, smooth_schedule(), eta=0.1)
    rho = random_density(grid, 6)
    out = integrate(rho, 0.5, 0.5, 0.01, gen)
    assert out is rho


def test_integrate_rejects_singular_start():
    grid = GridSpec(1, 4)
    gen = GeneratorConfig(pair_objective(), grid, sgdm_schedule(), eta=0.1)
    rho = DensityState(grid, _uniform_density(grid))
    with pytest.raises(ValueError):
        integrate(rho, 0.0, 0.5, 0.01, gen)
    integrate(rho, 0.05, 0.1, 0.001, gen)  # offset start is fine


def test_integrate_unitary_limit_matches_fine_step_oracle():
    # eta = 0: compare against a time-ordered product of midpoint
    # exponentials on a 10x finer grid
    grid = GridSpec(1, 4)
    sched = smooth_schedule()
    gen = GeneratorConfig(pair_objective(), grid, sched, eta=0.0)
    rho0 = DensityState(grid, _uniform_density(grid))
    t0, t1, dt = 0.2, 1.2, 0.01
    out = integrate(rho0, t0, t1, dt, gen)
    n_fine = 1000
    h = (t1 - t0) / n_fine
    u_total = np.eye(4, dtype=complex)
    for i in range(n_fine):
        t = t0 + (i + 0.5) * h
        hmat = sched.psi_exp(t) * gen.kinetic + sched.chi_exp(t) * np.diag(gen.fvec)
        u_total = expm(-1j * sched.u(t) * h * hmat) @ u_total
    oracle = u_total @ rho0.matrix @ u_total.conj().T
    assert trace_distance_matrices(out.matrix, oracle) < 1e-6


def test_integrate_richardson_order():
    grid = GridSpec(1, 4)
    gen = GeneratorConfig(pair_objective(), grid, smooth_schedule(), eta=0.05)
    rho0 = DensityState(grid, _uniform_density(grid))
    ref = integrate(rho0, 0.0, 1.0, 0.0025, gen)
    e1 = trace_distance_matrices(integrate(rho0, 0.0, 1.0, 0.05, gen).matrix, ref.matrix)
    e2 = trace_distance_matrices(integrate(rho0, 0.0, 1.0, 0.025, gen).matrix, ref.matrix)
    assert 12.0 <= e1 / e2 <= 20.0


def test_integrate_invariants_over_long_span():
    grid = GridSpec(1, 16)
    gen = GeneratorConfig(pair_objective(), grid, smooth_schedule(), eta=0.01)
    rho0 = DensityState(grid, _uniform_density(grid))
    out = integrate(rho0, 0.0, 2.0, 0.002, gen)
    assert abs(np.trace(out.matrix).real - 1.0) < 1e-8
    assert np.max(np.abs(out.matrix - out.matrix.conj().T)) < 1e-10
    assert np.linalg.eigvalsh(out.matrix)[0] > -1e-8


def test_integrate_unstable_step_aborts_with_index():
    grid = GridSpec(1, 16)
    gen = GeneratorConfig(pair_objective(), grid, sgdm_schedule(), eta=0.1)
    rho0 = DensityState(grid, _uniform_density(grid))
    # dt far beyond the stability limit near the singular start
    with pytest.raises(InvariantViolation) as err:
        integrate(rho0, 0.005, 0.5, 0.05, gen)
    assert "step" in str(err.value)


def test_integrate_path_matches_fixed_step():
    grid = GridSpec(1, 4)
    gen = GeneratorConfig(pair_objective(), grid, smooth_schedule(), eta=0.05)
    rho0 = _uniform_density(grid)
    fixed = integrate(DensityState(grid, rho0), 0.0, 0.8, 0.004, gen)
    path = integrate_path(gen, rho0, 0.0, [0.4, 0.8], dt_max=0.004)
    assert trace_distance_matrices(fixed.matrix, path[-1]) < 1e-10


# ---------------------------------------------------------------------------
# trace distance


def test_trace_distance_basics():
    grid = GridSpec(1, 2)
    rho = random_density(grid, 7)
    assert trace_distance(rho, rho) == 0.0
    a = basis_state(grid, 0).amplitudes
    b = basis_state(grid, 1).amplitudes
    pa = DensityState(grid, np.outer(a, a.conj()))
    pb = DensityState(grid, np.outer(b, b.conj()))
    assert trace_distance(pa, pb) == pytest.approx(1.0, abs=1e-12)
    d1 = DensityState(grid, np.diag([0.7, 0.3]))
    d2 = DensityState(grid, np.diag([0.5, 0.5]))
    assert trace_distance(d1, d2) == pytest.approx(0.2, abs=1e-12)


def test_trace_distance_range_and_mismatch():
    g2, g4 = GridSpec(1, 2), GridSpec(1, 4)
    with pytest.raises(ValueError):
        trace_distance(random_density(g2, 8), random_density(g4, 9))
    rng = np.random.default_rng(10)
    for _ in range(20):
        a = random_density(g4, rng.integers(1 << 30))
        b = random_density(g4, rng.integers(1 << 30))
        d = trace_distance(a, b)
        assert -1e-10 <= d <= 1.0 + 1e-10


# ---------------------------------------------------------------------------
# weak approximation report


def weak_cfg(**kw):
    defaults = dict(
        objective=pair_objective(),
        grid=GridSpec(1, 4),
        schedule=smooth_schedule(),
        eta=0.05,
        N=8,
        samples=1,
    )
    defaults.update(kw)
    return RunConfig(**defaults)


def test_weak_report_constant_objective_trivial():
    const = FiniteSumObjective(
        name="const",
        d=1,
        m=2,
        component=lambda j, x: np.full(x.shape[:-1], float(j)),
        component_grad=lambda j, x: np.zeros_like(x),
    )
    rep = weak_approx_report(weak_cfg(objective=const))
    # both dynamics reduce to global phases on the uniform state
    assert rep["max_trace_distance"]["eta"] < 1e-7


def test_weak_report_order_two():
    rep = weak_approx_report(weak_cfg())
    assert 1.5 <= rep["empirical_order"] <= 2.5
    dists = rep["per_checkpoint"]["eta"]["distances"]
    assert rep["max_trace_distance"]["eta"] == max(dists)


def test_weak_report_m1_smaller_than_m2():
    rep2 = weak_approx_report(weak_cfg())
    rep1 = weak_approx_report(weak_cfg(objective=make_convex_quadratic([[0.0]])))
    assert rep1["max_trace_distance"]["eta"] < rep2["max_trace_distance"]["eta"]


def test_weak_report_monte_carlo_channel():
    rep = weak_approx_report(weak_cfg(samples=2000), channel="monte-carlo")
    assert rep["mc_samples"] == 2000
    assert rep["max_trace_distance"]["eta"] < 0.1
