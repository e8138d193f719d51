"""Built-in validation suites behind the `validate` CLI subcommand.

Three suites: `invariants` (definitional conservation checks), `oracle`
(fast paths against dense/enumeration/jump-form oracles), and `order`
(eta-halving measurements of the discretization orders).
"""

import numpy as np
from scipy.linalg import expm

from .dynamics import RunConfig, channel_average, run_qhd, run_sqhd, sqhd_step
from .grid import DensityState, GridSpec, WaveState, uniform_state
from .lindblad import (
    GeneratorConfig,
    _uniform_density,
    gamma_matrix,
    integrate,
    monte_carlo_channel_states,
    trace_distance_matrices,
    weak_approx_report,
)
from .objectives import default_reference_grid, landscape, make_convex_quadratic
from .schedules import discrete_params, log_time_sis_schedule, sgdm_schedule
from .spectral import apply_kinetic_phase, dense_laplacian, dft_forward, dft_inverse, laplacian_eigenvalues


def _check(name, value, bound, kind="max"):
    if kind == "max":
        passed = value <= bound
    elif kind == "min":
        passed = value >= bound
    else:  # range
        passed = bound[0] <= value <= bound[1]
    return {
        "name": name,
        "passed": bool(passed),
        "value": float(value) if np.isscalar(value) or isinstance(value, float) else value,
        "bound": bound,
    }


def _random_state(grid, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=grid.npoints) + 1j * rng.normal(size=grid.npoints)
    return WaveState(grid, amps / np.linalg.norm(amps))


def _pair_cfg(**kw):
    obj = make_convex_quadratic([[-0.5], [0.5]])
    defaults = dict(
        objective=obj,
        grid=GridSpec(1, 4),
        schedule=sgdm_schedule(),
        eta=0.1,
        N=3,
        seed=7,
        samples=1,
        landscape=landscape(obj, default_reference_grid(1)),
    )
    defaults.update(kw)
    return RunConfig(**defaults)


def suite_invariants():
    checks = []

    st = _random_state(GridSpec(2, 8), 0)
    back = dft_inverse(dft_forward(st))
    checks.append(_check("dft_round_trip", float(np.max(np.abs(back.amplitudes - st.amplitudes))), 1e-12))

    out = apply_kinetic_phase(st, 0.37)
    checks.append(_check("kinetic_unitarity", abs(np.linalg.norm(out.amplitudes) - 1.0), 1e-12))

    worst = 0.0
    for d, n_r in [(1, 16), (2, 8)]:
        g = GridSpec(d, n_r)
        dense = np.sort(np.linalg.eigvalsh(dense_laplacian(g)))
        closed = np.sort(laplacian_eigenvalues(g).dense_eigen_array().ravel())
        worst = max(worst, float(np.max(np.abs(dense - closed))))
    checks.append(_check("laplacian_spectrum_closed_form", worst, 1e-9))

    cfg = _pair_cfg(grid=GridSpec(1, 16), N=500, samples=2)
    checks.append(_check("sqhd_norm_drift", run_sqhd(cfg).norm_drift, 1e-10))
    checks.append(_check("qhd_norm_drift", run_qhd(cfg).norm_drift, 1e-10))

    rho = channel_average(_pair_cfg(N=4))
    herm = float(np.max(np.abs(rho.matrix - rho.matrix.conj().T)))
    checks.append(_check("channel_hermiticity", herm, 1e-10))
    checks.append(_check("channel_trace", abs(np.trace(rho.matrix).real - 1.0), 1e-10))
    checks.append(_check("channel_min_eigenvalue", float(np.linalg.eigvalsh(rho.matrix)[0]), -1e-10, kind="min"))

    worst = 0.0
    for m in range(1, 17):
        worst = min(worst, float(np.linalg.eigvalsh(gamma_matrix(m))[0]))
    checks.append(_check("gamma_matrix_psd_m_le_16", worst, -1e-12, kind="min"))

    obj = make_convex_quadratic([[-0.5], [0.5]])
    gen = GeneratorConfig(obj, GridSpec(1, 16), log_time_sis_schedule(C=2.0, t_eps=1.0), eta=0.01)
    out = integrate(DensityState(gen.grid, _uniform_density(gen.grid)), 0.0, 2.0, 0.002, gen)
    checks.append(_check("lindblad_trace_drift", abs(np.trace(out.matrix).real - 1.0), 1e-8))
    checks.append(_check("lindblad_hermiticity", float(np.max(np.abs(out.matrix - out.matrix.conj().T))), 1e-10))
    checks.append(_check("lindblad_min_eigenvalue", float(np.linalg.eigvalsh(out.matrix)[0]), -1e-8, kind="min"))

    return _suite("invariants", checks)


def suite_oracle():
    checks = []

    g = GridSpec(1, 8)
    st = _random_state(g, 1)
    theta = 0.3
    expected = expm(-1j * theta * dense_laplacian(g) / 2.0) @ st.amplitudes
    got = apply_kinetic_phase(st, theta).amplitudes
    checks.append(_check("kinetic_phase_vs_dense_expm", float(np.linalg.norm(got - expected)), 1e-8))

    g4 = GridSpec(1, 4)
    st4 = _random_state(g4, 2)
    a, b, eta = 0.9, 1.4, 0.3
    vals = np.array([0.2, -0.7, 1.1, 0.4])
    lap = dense_laplacian(g4)
    kin_half = expm(-1j * (eta * a / 2.0) * lap / 2.0)
    dense = kin_half @ np.diag(np.exp(-1j * eta * b * vals)) @ kin_half @ st4.amplitudes
    got = sqhd_step(st4, a, b, eta, vals).amplitudes
    checks.append(_check("sqhd_step_vs_dense_product", float(np.linalg.norm(got - dense)), 1e-9))

    cfg = _pair_cfg(N=3, samples=10_000)
    exact = channel_average(cfg)
    _, mats = monte_carlo_channel_states(cfg)
    checks.append(_check("channel_vs_monte_carlo", trace_distance_matrices(exact.matrix, mats[-1]), 0.03))

    obj = make_convex_quadratic([[-0.5], [0.5]])
    sched = log_time_sis_schedule(C=2.0, t_eps=1.0)
    gen = GeneratorConfig(obj, GridSpec(1, 8), sched, eta=0.2)
    rng = np.random.default_rng(3)
    amat = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = amat + amat.conj().T
    t = 0.6
    u, chi = sched.u(t), sched.chi_exp(t)
    h = sched.psi_exp(t) * gen.kinetic + chi * np.diag(gen.fvec)
    oracle = -1j * u * (h @ rho - rho @ h)
    gamma = gamma_matrix(obj.m)
    jumps = [u * np.sqrt(gen.eta) * chi * np.diag(gen.ftable[j]) for j in range(obj.m)]
    for j in range(obj.m):
        for k in range(obj.m):
            aj, ak = jumps[j], jumps[k]
            oracle += gamma[j, k] * (
                aj @ rho @ ak.conj().T
                - 0.5 * (ak.conj().T @ aj @ rho + rho @ ak.conj().T @ aj)
            )
    checks.append(_check("lindblad_rhs_vs_jump_form", float(np.max(np.abs(gen.rhs(rho, t) - oracle))), 1e-10))

    return _suite("oracle", checks)


def suite_order():
    checks = []

    cfg = RunConfig(
        objective=make_convex_quadratic([[-0.5], [0.5]]),
        grid=GridSpec(1, 4),
        schedule=log_time_sis_schedule(C=2.0, t_eps=1.0),
        eta=0.05,
        N=8,
        samples=1,
    )
    rep = weak_approx_report(cfg)
    checks.append(_check("weak_approximation_order", rep["empirical_order"], (1.5, 2.5), kind="range"))

    gen = GeneratorConfig(cfg.objective, cfg.grid, cfg.schedule, eta=0.05)
    rho0 = DensityState(cfg.grid, _uniform_density(cfg.grid))
    ref = integrate(rho0, 0.0, 1.0, 0.0025, gen)
    e1 = trace_distance_matrices(integrate(rho0, 0.0, 1.0, 0.05, gen).matrix, ref.matrix)
    e2 = trace_distance_matrices(integrate(rho0, 0.0, 1.0, 0.025, gen).matrix, ref.matrix)
    checks.append(_check("integrator_richardson_factor", e1 / e2, (12.0, 20.0), kind="range"))

    return _suite("order", checks)


def _suite(name, checks):
    return {
        "suite": name,
        "passed": all(c["passed"] for c in checks),
        "failed_checks": [c["name"] for c in checks if not c["passed"]],
        "checks": checks,
    }


SUITES = {
    "invariants": suite_invariants,
    "oracle": suite_oracle,
    "order": suite_order,
}


def run_suites(names):
    results = [SUITES[name]() for name in names]
    return {
        "passed": all(r["passed"] for r in results),
        "failed_checks": [c for r in results for c in r["failed_checks"]],
        "suites": results,
    }
