"""Stochastic gradient descent with momentum, the classical baseline.

Update rule with averaging-style coefficients beta_k = k/(k+2) and
gamma_k = 2 eta / (k+3):

    v_k     = beta_k v_{k-1} + grad f_{j_k}(x_k),   v_{-1} = 0
    x_{k+1} = clamp(x_k - gamma_k v_k)

with j_k uniform on the m components and x_0 uniform on [-1, 1]^d.
Iterates are clamped to the box so the baseline stays comparable with the
grid-bounded quantum runs, which have nowhere else to go.

Each run owns an RNG stream; a run consumes its stream as one uniform(d)
draw for x_0 followed by one bulk integers(N) draw for the component
choices, so the vectorized ensemble reproduces scalar runs bit-for-bit.
"""

import time
from dataclasses import dataclass

import numpy as np

from .metrics import DEFAULT_DELTA


def run_stream(seed, run_index):
    """RNG stream owned by one baseline run."""
    return np.random.default_rng(np.random.SeedSequence((seed, 0x5D, run_index)))


def _momentum_coeffs(k, eta):
    return k / (k + 2.0), 2.0 * eta / (k + 3.0)


def sgdm_run(obj, eta, N, rng, checkpoint_stride=1):
    """Single trajectory; returns (checkpoint iterations, iterates array)."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    x = rng.uniform(-1.0, 1.0, size=obj.d)
    picks = rng.integers(0, obj.m, size=N)
    v = np.zeros(obj.d)
    ks = [0]
    xs = [x.copy()]
    for k in range(N):
        g = obj.component_grad(int(picks[k]), x)
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient at iterate {k}")
        beta, gamma = _momentum_coeffs(k, eta)
        v = beta * v + g
        x = np.clip(x - gamma * v, -1.0, 1.0)
        if (k + 1) % checkpoint_stride == 0 or (k + 1) == N:
            ks.append(k + 1)
            xs.append(x.copy())
    return np.array(ks), np.array(xs)


@dataclass
class EnsembleCurves:
    iterations: np.ndarray
    times: np.ndarray
    expected_loss: np.ndarray
    success_prob: np.ndarray
    stderr_loss: np.ndarray
    stderr_succ: np.ndarray
    runs: int
    seed: int
    wall_time: float = 0.0
    metadata: dict = None


def sgdm_ensemble(obj, eta, N, runs, seed, delta, scape, checkpoint_stride=1):
    """Ensemble metric curves over independent runs (vectorized in lock-step).

    Losses are measured against the reference landscape extrema; constant
    objectives count every iterate as a success (degenerate-range convention,
    flagged in the metadata).
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if delta is None:
        delta = DEFAULT_DELTA.get(obj.name, 0.1)
    start = time.perf_counter()

    x = np.empty((runs, obj.d))
    picks = np.empty((runs, N), dtype=np.int16)  # m <= a few dozen; keep the matrix small
    for r in range(runs):
        stream = run_stream(seed, r)
        x[r] = stream.uniform(-1.0, 1.0, size=obj.d)
        picks[r] = stream.integers(0, obj.m, size=N)

    v = np.zeros((runs, obj.d))
    ks = [0]
    loss_rows = []
    succ_rows = []

    def record(xs):
        f = obj.value(xs)
        loss_rows.append(f - scape.fmin)
        if scape.degenerate:
            succ_rows.append(np.ones(runs))
        else:
            succ_rows.append(((f - scape.fmin) / scape.frange < delta).astype(float))

    record(x)
    for k in range(N):
        g = np.empty((runs, obj.d))
        col = picks[:, k]
        for c in np.unique(col):
            rows = col == c
            g[rows] = obj.component_grad(int(c), x[rows])
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient at iterate {k}")
        beta, gamma = _momentum_coeffs(k, eta)
        v = beta * v + g
        x = np.clip(x - gamma * v, -1.0, 1.0)
        if (k + 1) % checkpoint_stride == 0 or (k + 1) == N:
            ks.append(k + 1)
            record(x)

    loss = np.array(loss_rows)
    succ = np.array(succ_rows)
    sqrt_r = np.sqrt(runs)
    iters = np.array(ks)
    return EnsembleCurves(
        iterations=iters,
        times=iters * eta,
        expected_loss=loss.mean(axis=1),
        success_prob=succ.mean(axis=1),
        stderr_loss=loss.std(axis=1, ddof=1) / sqrt_r if runs > 1 else np.zeros(len(ks)),
        stderr_succ=succ.std(axis=1, ddof=1) / sqrt_r if runs > 1 else np.zeros(len(ks)),
        runs=runs,
        seed=seed,
        wall_time=time.perf_counter() - start,
        metadata={
            "objective": obj.name,
            "eta": eta,
            "N": N,
            "delta": delta,
            "degenerate_success_convention": bool(scape.degenerate),
        },
    )
