"""Time-dependent Hamiltonian coefficients and their discrete midpoint values.

A schedule is the triple (e^psi, e^chi, u): kinetic coefficient, potential
coefficient, and learning-rate modulation with values in [0, 1].  The two
built-ins follow the accelerated-gradient and momentum coefficient choices

    nagd:       e^psi = 2 t^-3,  e^chi = 2 t^3,  u = 1
    sgdm-style: e^psi = t^-2,    e^chi = 2 t,    u = 1/2

both singular at t = 0; the discrete parameters are therefore evaluated at
midpoint times (j + 1/2) eta, which never touch the singularity.  The
strong-ideal-scaling constructor builds schedules from exponent functions
(alpha, beta, gamma) tied by beta' = gamma' = e^alpha, the coupling under
which the convergence guarantee applies.
"""

import math
from dataclasses import dataclass

import numpy as np


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class Schedule:
    name: str
    psi_exp: "object"  # t -> e^psi(t)
    chi_exp: "object"  # t -> e^chi(t)
    u: "object"        # t -> [0, 1]

    def with_unit_rate(self):
        """Same coefficients with the learning-rate modulation forced to 1."""
        return Schedule(self.name + "+u1", self.psi_exp, self.chi_exp, lambda t: 1.0)


def _positive_time(t):
    if t <= 0:
        raise ScheduleError(f"schedule is singular at t <= 0 (got t={t!r})")
    return t


def nagd_schedule():
    return Schedule(
        name="nagd",
        psi_exp=lambda t: 2.0 * _positive_time(t) ** -3,
        chi_exp=lambda t: 2.0 * _positive_time(t) ** 3,
        u=lambda t: 1.0,
    )


def sgdm_schedule():
    return Schedule(
        name="sgdm-style",
        psi_exp=lambda t: _positive_time(t) ** -2,
        chi_exp=lambda t: 2.0 * _positive_time(t),
        u=lambda t: 0.5,
    )


def strong_ideal_scaling(
    alpha,
    beta,
    gamma,
    beta_dot,
    gamma_dot,
    name="custom-sis",
    check_times=None,
    tol=1e-6,
):
    """Build a schedule from exponents satisfying beta' = gamma' = e^alpha.

    psi = alpha - gamma, chi = alpha + beta + gamma, u = e^-(alpha + beta).
    The scaling condition is verified at 50 sample times both through the
    supplied derivative evaluators and through central finite differences;
    violations beyond tol (relative to max(1, e^alpha)) are rejected.
    """
    if check_times is None:
        check_times = np.linspace(0.2, 10.0, 50)
    for t in check_times:
        target = math.exp(alpha(t))
        scale = max(1.0, abs(target))
        for label, fn, dfn in (("beta", beta, beta_dot), ("gamma", gamma, gamma_dot)):
            if abs(dfn(t) - target) > tol * scale:
                raise ScheduleError(
                    f"strong ideal scaling violated: {label}'({t}) = {dfn(t)!r}, "
                    f"expected e^alpha = {target!r}"
                )
            h = 1e-7 * (1.0 + abs(t))
            fd = (fn(t + h) - fn(t - h)) / (2.0 * h)
            if abs(fd - target) > max(tol, 1e-5) * scale:
                raise ScheduleError(
                    f"strong ideal scaling violated (finite differences): "
                    f"{label}'({t}) ~ {fd!r}, expected {target!r}"
                )

    def u(t):
        val = math.exp(-(alpha(t) + beta(t)))
        if not 0.0 <= val <= 1.0 + 1e-12:
            raise ScheduleError(f"u({t}) = {val!r} outside [0, 1]")
        return min(val, 1.0)

    return Schedule(
        name=name,
        psi_exp=lambda t: math.exp(alpha(t) - gamma(t)),
        chi_exp=lambda t: math.exp(alpha(t) + beta(t) + gamma(t)),
        u=u,
    )


def log_time_sis_schedule(C=2.0, t_eps=0.01, name=None):
    """Canonical strong-ideal-scaling family: alpha = -log(t + t_eps),
    beta = log(t + t_eps) + log C, gamma = log(t + t_eps).

    Yields e^psi = (t + t_eps)^-2, e^chi = C (t + t_eps), u = 1/C; the
    momentum-style built-in is the t_eps -> 0 member with C = 2.
    """
    if C < 1.0:
        raise ScheduleError(f"need C >= 1 so that u = 1/C lies in [0, 1], got {C}")
    if t_eps <= 0:
        raise ScheduleError(f"need t_eps > 0, got {t_eps}")
    return strong_ideal_scaling(
        alpha=lambda t: -math.log(t + t_eps),
        beta=lambda t: math.log(t + t_eps) + math.log(C),
        gamma=lambda t: math.log(t + t_eps),
        beta_dot=lambda t: 1.0 / (t + t_eps),
        gamma_dot=lambda t: 1.0 / (t + t_eps),
        name=name or f"sis(C={C:g},t_eps={t_eps:g})",
    )


def discrete_params(schedule, eta, j, clamp=None):
    """Midpoint coefficients a_j = e^psi((j+1/2) eta), b_j = e^chi((j+1/2) eta).

    The early kinetic coefficients are astronomically large for the nagd
    schedule (a_0 ~ 1e7 at eta = 0.01); they are applied verbatim since the
    phases wrap modulo 2 pi.  Pass clamp to cap both coefficients instead.
    """
    if eta <= 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if j < 0:
        raise ValueError(f"iteration index must be >= 0, got {j}")
    t = (j + 0.5) * eta
    a = schedule.psi_exp(t)
    b = schedule.chi_exp(t)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError(f"non-finite discrete parameters at t={t}: a={a!r}, b={b!r}")
    if clamp is not None:
        a = min(a, clamp)
        b = min(b, clamp)
    return a, b


def adaptive_steps(schedule, eta, N):
    """Per-iteration step sizes eta_j = u((j + 1/2) eta) * eta, j = 0..N-1."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return np.array([schedule.u((j + 0.5) * eta) * eta for j in range(N)])


SCHEDULES = {
    "nagd": nagd_schedule,
    "sgdm-style": sgdm_schedule,
    "sis": log_time_sis_schedule,
}


def build_schedule(name, **params):
    """Instantiate a registered schedule by name."""
    try:
        factory = SCHEDULES[name]
    except KeyError:
        raise ValueError(
            f"unknown schedule {name!r}; known: {sorted(SCHEDULES)}"
        ) from None
    return factory(**params)
