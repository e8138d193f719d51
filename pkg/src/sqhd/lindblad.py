"""Dense integrator for the hybrid master equation used as continuous ground truth.

The generator combines the Hamiltonian drift with a double-commutator
diffusion term built from the finite-sum components,

    L(t)[rho] = u(t) (-i [H(t), rho])
              + u(t)^2 eta (e^{2 chi(t)} / 2)
                ([F,[F,rho]] - (1/m) sum_j [F_j,[F_j,rho]])

with H(t) = e^{psi(t)} K + e^{chi(t)} F, K the dense -Laplacian/2 and F,
F_j diagonal.  Because every F is diagonal, the diffusion term is a
Hadamard product with the precomputed weight matrix

    V_ab = (f_a - f_b)^2 - (1/m) sum_j (f_{j,a} - f_{j,b})^2 ,

which equals minus the component variance of the phase differences, so it
only damps coherences.  The equivalent jump-operator form with the
positive-semidefinite coupling matrix gamma_jk = delta_jk / m - 1/m^2 is
exercised by an independent oracle in the tests; the implemented sign is
the one consistent with that form.  noise_sign = -1 flips it for
sensitivity studies.

Integration is classical fixed-step RK4 with re-Hermitization after every
step and hard invariant checks (trace, Hermiticity, positivity); negative
eigenvalues beyond tolerance abort instead of being projected away.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .grid import DensityState
from .dynamics import channel_average_states, draw_component_indices
from .schedules import ScheduleError, discrete_params
from .spectral import dense_laplacian, laplacian_eigenvalues

_DENSE_CAP = 256

TRACE_TOL = 1e-8
HERM_TOL = 1e-10
EIG_TOL = 1e-8


class InvariantViolation(RuntimeError):
    pass


def gamma_matrix(m):
    """Coupling matrix delta_jk / m - 1/m^2 of the jump-operator form (PSD)."""
    return np.eye(m) / m - np.ones((m, m)) / m**2


class GeneratorConfig:
    """Cached dense operators for one (objective, grid, schedule, eta) choice."""

    def __init__(self, objective, grid, schedule, eta, noise_sign=1.0, kinetic_sign=1.0):
        if grid.npoints > _DENSE_CAP:
            raise ValueError(
                f"dense generator capped at {_DENSE_CAP} points, grid has {grid.npoints}"
            )
        self.objective = objective
        self.grid = grid
        self.schedule = schedule
        self.eta = eta
        self.noise_sign = noise_sign
        self.kinetic_sign = kinetic_sign
        self.kinetic = kinetic_sign * dense_laplacian(grid) / 2.0
        self.ftable = objective.tabulate_components(grid)  # (m, npoints)
        self.fvec = self.ftable.mean(axis=0)
        diff_total = (self.fvec[:, None] - self.fvec[None, :]) ** 2
        diff_comp = np.mean(
            (self.ftable[:, :, None] - self.ftable[:, None, :]) ** 2, axis=0
        )
        self.noise_weights = diff_total - diff_comp
        self._knorm = float(laplacian_eigenvalues(grid).axis_eigenvalues.max()) * grid.d / 2.0
        self._fmax = float(np.abs(self.fvec).max())
        self._vmax = float(np.abs(self.noise_weights).max())

    def rhs(self, rho, t):
        """Raw generator action on a (possibly non-Hermitian) matrix."""
        u = self.schedule.u(t)
        psi = self.schedule.psi_exp(t)
        chi = self.schedule.chi_exp(t)
        h_rho = psi * (self.kinetic @ rho) + chi * (self.fvec[:, None] * rho)
        rho_h = psi * (rho @ self.kinetic) + chi * (rho * self.fvec[None, :])
        out = -1j * u * (h_rho - rho_h)
        coeff = self.noise_sign * u * u * self.eta * chi * chi / 2.0
        out += coeff * (self.noise_weights * rho)
        return out

    def norm_bound(self, t):
        """Crude superoperator norm bound used for stability-limited stepping."""
        u = self.schedule.u(t)
        psi = self.schedule.psi_exp(t)
        chi = self.schedule.chi_exp(t)
        return (
            2.0 * u * (psi * self._knorm + chi * self._fmax)
            + u * u * self.eta * chi * chi / 2.0 * self._vmax
        )

    def finite_at(self, t):
        try:
            vals = (self.schedule.u(t), self.schedule.psi_exp(t), self.schedule.chi_exp(t))
        except (ScheduleError, ValueError, ZeroDivisionError, OverflowError):
            return False
        return all(np.isfinite(v) for v in vals)


def lindblad_rhs(rho, t, gen):
    """Generator applied to a DensityState; Hermitian and traceless output."""
    return gen.rhs(rho.matrix, t)


def _rk4_step(rho, t, h, gen):
    k1 = gen.rhs(rho, t)
    k2 = gen.rhs(rho + 0.5 * h * k1, t + 0.5 * h)
    k3 = gen.rhs(rho + 0.5 * h * k2, t + 0.5 * h)
    k4 = gen.rhs(rho + h * k3, t + h)
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _checked_step(rho, t, h, step_index, gen, check_eigs):
    rho = _rk4_step(rho, t, h, gen)
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERM_TOL:
        raise InvariantViolation(
            f"Hermiticity residual {herm:.3e} > {HERM_TOL} at step {step_index}"
        )
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvariantViolation(
            f"trace drift {tr - 1.0:.3e} beyond {TRACE_TOL} at step {step_index}"
        )
    if check_eigs:
        min_eig = float(np.linalg.eigvalsh(rho)[0])
        if min_eig < -EIG_TOL:
            raise InvariantViolation(
                f"minimum eigenvalue {min_eig:.3e} < -{EIG_TOL} at step {step_index}"
            )
    return rho


def integrate(rho0, t0, t1, dt, gen, check_every=1):
    """Fixed-step RK4 evolution of a DensityState over [t0, t1].

    dt is an upper bound on the uniform step (refined so the steps divide
    the interval exactly).  Invariant violations abort with the step index.
    """
    if t0 < 0 or t1 < t0:
        raise ValueError(f"need 0 <= t0 <= t1, got [{t0}, {t1}]")
    if t1 == t0:
        return rho0
    if dt <= 0 or dt > (t1 - t0) * (1 + 1e-12):
        raise ValueError(f"dt must lie in (0, t1 - t0], got {dt}")
    if not gen.finite_at(t0):
        raise ValueError(
            f"generator is singular at t0={t0}; start at the midpoint offset eta/2"
        )
    n = max(1, math.ceil((t1 - t0) / dt - 1e-12))
    h = (t1 - t0) / n
    rho = rho0.matrix.copy()
    for i in range(n):
        check = (i % check_every == 0) or (i == n - 1)
        rho = _checked_step(rho, t0 + i * h, h, i, gen, check)
    return DensityState(gen.grid, rho)


def integrate_path(gen, rho0_matrix, t0, times, dt_max, safety=0.25, check_every=8):
    """RK4 states at the requested times with stability-limited step sizes.

    Near a singular schedule start the generator norm blows up like a power
    of 1/t, so a fixed step that resolves the tail would be unstable at the
    head; each sub-step is capped at safety * 2.8 / ||L(t)|| (the RK4
    imaginary-axis stability limit) in addition to dt_max.
    """
    rho = rho0_matrix.copy()
    t = t0
    step_index = 0
    out = []
    for target in times:
        if target < t - 1e-12:
            raise ValueError("times must be non-decreasing and >= t0")
        while t < target - 1e-15:
            h = min(dt_max, safety * 2.8 / max(gen.norm_bound(t), 1e-300), target - t)
            check = step_index % check_every == 0
            rho = _checked_step(rho, t, h, step_index, gen, check)
            t += h
            step_index += 1
        out.append(rho.copy())
    return out


def trace_distance(rho, sigma):
    """Half the trace norm of rho - sigma."""
    if rho.grid != sigma.grid:
        raise ValueError("states live on different grids")
    return trace_distance_matrices(rho.matrix, sigma.matrix)


def trace_distance_matrices(a, b):
    diff = a - b
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def _uniform_density(grid):
    amp = grid.n_r ** (-grid.d / 2.0)
    psi = np.full(grid.npoints, amp, dtype=complex)
    return np.outer(psi, psi.conj())


def monte_carlo_channel_states(cfg, stride=1):
    """Channel-average estimate from cfg.samples sampled component words.

    Returns (iterations, matrices); the sampling floor on trace distances
    scales like sqrt(dim^2 / samples), so this is for qualitative reports
    where exhaustive enumeration is out of reach.
    """
    if cfg.grid.npoints > _DENSE_CAP:
        raise ValueError(f"density estimates capped at {_DENSE_CAP} points")
    grid, schedule, eta = cfg.grid, cfg.schedule, cfg.eta
    m = cfg.objective.m
    tables = cfg.objective.tabulate_components(grid)
    lam = laplacian_eigenvalues(grid).dense_eigen_array()
    shape = grid.shape
    axes = tuple(range(1, grid.d + 1))
    tables_shaped = tables.reshape((m,) + shape)
    xi = draw_component_indices(cfg.seed, cfg.samples, cfg.N, m)

    states = np.full((cfg.samples,) + shape, grid.n_r ** (-grid.d / 2.0), dtype=complex)

    def density():
        flat = states.reshape(cfg.samples, -1)
        rho = flat.T @ flat.conj() / cfg.samples
        return 0.5 * (rho + rho.conj().T)

    iters = [0]
    mats = [density()]
    for j in range(cfg.N):
        a, b = discrete_params(schedule, eta, j, cfg.clamp)
        kin = np.exp(-0.5j * cfg.kinetic_sign * (eta * a / 2.0) * lam)
        states = np.fft.ifftn(np.fft.fftn(states, axes=axes) * kin, axes=axes)
        used = np.unique(xi[:, j])
        phases = {c: np.exp(-1j * eta * b * tables_shaped[c]) for c in used}
        for r in range(cfg.samples):
            states[r] = states[r] * phases[xi[r, j]]
        states = np.fft.ifftn(np.fft.fftn(states, axes=axes) * kin, axes=axes)
        if (j + 1) % stride == 0 or (j + 1) == cfg.N:
            iters.append(j + 1)
            mats.append(density())
    return iters, mats


def weak_approx_report(cfg, dt=None, channel="exhaustive", stride=1, safety=0.25):
    """Trace-distance comparison of the continuous channel against the
    discrete one at step sizes eta and eta/2, with the empirical order.

    The discrete channel never sees the learning-rate modulation u, so the
    continuous side runs with u forced to 1.  For schedules singular at
    t = 0 the integration starts at the midpoint offset eta/2 (comparison
    convention); smooth schedules start at 0.
    """
    if channel not in ("exhaustive", "monte-carlo"):
        raise ValueError(f"unknown channel estimator {channel!r}")
    report = {"eta": cfg.eta, "eta_half": cfg.eta / 2.0, "channel": channel,
              "u_forced_to_one": True, "schedule": cfg.schedule.name,
              "objective": cfg.objective.name}
    if channel == "monte-carlo":
        report["mc_samples"] = cfg.samples
    errs = {}
    for label, eta, n_iter in (("eta", cfg.eta, cfg.N), ("eta_half", cfg.eta / 2.0, 2 * cfg.N)):
        sub = replace(cfg, eta=eta, N=n_iter)
        if channel == "exhaustive":
            rhos = channel_average_states(sub)
            iters = list(range(0, n_iter + 1))
            mats = [r.matrix for r in rhos]
        else:
            iters, mats = monte_carlo_channel_states(sub, stride=stride)
        gen = GeneratorConfig(
            cfg.objective,
            cfg.grid,
            cfg.schedule.with_unit_rate(),
            eta,
            noise_sign=cfg.noise_sign,
            kinetic_sign=cfg.kinetic_sign,
        )
        t0 = 0.0 if gen.finite_at(0.0) else eta / 2.0
        compare = [(k, mat) for k, mat in zip(iters, mats) if k > 0 and k % stride == 0]
        if compare and compare[-1][0] != iters[-1]:
            compare.append((iters[-1], mats[-1]))
        times = [k * eta for k, _ in compare]
        path = integrate_path(
            gen, _uniform_density(cfg.grid), t0, times, dt_max=dt or eta / 20.0,
            safety=safety,
        )
        dists = [
            trace_distance_matrices(cont, disc)
            for cont, (_, disc) in zip(path, compare)
        ]
        errs[label] = {
            "iterations": [k for k, _ in compare],
            "times": times,
            "distances": dists,
            "max_trace_distance": max(dists),
            "t0": t0,
        }
    report["per_checkpoint"] = errs
    report["max_trace_distance"] = {
        "eta": errs["eta"]["max_trace_distance"],
        "eta_half": errs["eta_half"]["max_trace_distance"],
    }
    report["empirical_order"] = float(
        np.log2(errs["eta"]["max_trace_distance"] / errs["eta_half"]["max_trace_distance"])
    )
    return report
